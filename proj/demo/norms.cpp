// Walk-through: norms of H(1), the operator norm formula, and a boundedness verdict.

#include <cmath>
#include <cstdio>

#include "hilbertop/report.hpp"

using namespace hilbertop;

int main() {
  const auto h1 = hilbert_one_series(1024);
  const auto b = bmoa_norm(h1);
  std::printf("||H(1)||_BMOA    = %.6f  (sup of Garsia at a = %.4f%+.4fi)\n", b.norm_value, b.sup_part.argmax.real(),
              b.sup_part.argmax.imag());
  std::printf("||H(1)||_Lambda  = %.6f\n", lambda_norm(h1, 2.0));

  // The same function through the coefficient and integral forms of H.
  const auto f = automorphism_series(DiscAutomorphism(1.0, 0.5), 64);
  const cplx z(0.3, 0.4);
  std::printf("H(f)(z): series %.12f, integral %.12f\n", eval(hilbert_coeff(f, 800), z).real(),
              hilbert_integral(f, z).real());

  for (const auto& mu : {MeasureDescriptor::unit_atom(), MeasureDescriptor::qp(0.5)}) {
    const auto r = log_norm_sq_formula(mu);
    std::printf("%-8s ||H||_{H^inf -> M(D_mu)} = %.6f\n", to_string(mu.kind()), 1.0 + std::sqrt(r.value));
  }

  const auto rep = boundedness_check(MeasureDescriptor::remark(0.5));
  std::printf("remark(0.5): %s, last-rung growth %.3f\n", to_string(rep.verdict), rep.max_growth);
}
