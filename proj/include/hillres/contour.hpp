#pragma once
#include <functional>
#include <unordered_map>
#include <vector>

#include "hillres/types.hpp"

namespace hillres {

struct Rect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(cplx z, double slack = 0.0) const {
        return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack && z.imag() <= y1 + slack;
    }
};

struct ContourOptions {
    double max_phase_step = 0.5;  // radians between accepted neighbouring samples
    double base_step = 0.25;      // initial sample spacing along an edge
    int max_depth = 48;           // bisection depth per edge segment
    double newton_box = 1.0;      // boxes holding one zero and smaller than this go to Newton
    double min_box = 1e-8;        // boxes below this size report a cluster as one multiple zero
    int newton_iters = 60;
};

using AnalyticFn = std::function<cplx(cplx)>;

struct ZeroCluster {
    cplx z;
    int multiplicity = 1;
};

// counts zeros with multiplicity inside r by the argument principle, caching samples across calls
class ArgumentPrinciple {
public:
    ArgumentPrinciple(AnalyticFn f, ContourOptions opt = {});

    int count(const Rect& r);
    std::vector<ZeroCluster> zeros(const Rect& r);
    std::size_t evaluations() const { return evals_; }

private:
    cplx value(cplx z);
    double segment_phase(cplx a, cplx b, cplx fa, cplx fb, int depth);
    double edge_phase(cplx a, cplx b);
    void search(const Rect& r, int n, std::vector<ZeroCluster>& out, int depth);
    bool newton(const Rect& r, cplx& z);
    int count_or_throw(const Rect& r);

    AnalyticFn f_;
    ContourOptions opt_;
    std::size_t evals_ = 0;
    struct Key {
        double x, y;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };
    std::unordered_map<Key, cplx, KeyHash> cache_;
};

}  // namespace hillres
