// Fixed-order Gauss-Legendre rule used for all sector integrals.
#ifndef PQNC_QUADRATURE_HPP
#define PQNC_QUADRATURE_HPP

#include <array>
#include <cstddef>

namespace pqnc {

// Positive half of the 32-point Gauss-Legendre rule on [-1, 1];
// nodes come in +/- pairs sharing a weight.
struct GaussLegendre32 {
    static constexpr int half = 16;
    static constexpr std::array<double, half> node = {
        4.83076656877383104e-02, 1.44471961582796488e-01, 2.39287362252137065e-01,
        3.31868602282127667e-01, 4.21351276130635333e-01, 5.06899908932229359e-01,
        5.87715757240762304e-01, 6.63044266930215231e-01, 7.32182118740289711e-01,
        7.94483795967942386e-01, 8.49367613732569970e-01, 8.96321155766052202e-01,
        9.34906075937739667e-01, 9.64762255587506390e-01, 9.85611511545268382e-01,
        9.97263861849481570e-01};
    static constexpr std::array<double, half> weight = {
        9.65400885147278121e-02, 9.56387200792748332e-02, 9.38443990808045664e-02,
        9.11738786957638631e-02, 8.76520930044039082e-02, 8.33119242269468457e-02,
        7.81938957870703111e-02, 7.23457941088484491e-02, 6.58222227763617523e-02,
        5.86840934785357038e-02, 5.09980592623762441e-02, 4.28358980222264263e-02,
        3.42738629130216257e-02, 2.53920653092624266e-02, 1.62743947309059653e-02,
        7.01861000946929839e-03};
};

// Integrate f over [a, b] with the 32-point rule.
template <typename F>
double gauss_legendre_32(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < GaussLegendre32::half; ++i) {
        const double dx = hw * GaussLegendre32::node[static_cast<size_t>(i)];
        acc += GaussLegendre32::weight[static_cast<size_t>(i)] * (f(mid - dx) + f(mid + dx));
    }
    return acc * hw;
}

// Compensated accumulator for long sums feeding entropy terms.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

} // namespace pqnc

#endif
