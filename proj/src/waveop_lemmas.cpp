#include <algorithm>

#include "dipole/dist.hpp"
#include "dipole/waveop.hpp"

namespace dipole {

LemmaReport verify_lemma_A3_A4(ShellLemma which, Channel channel, Sign sign, const std::vector<double>& t_list,
                               const std::vector<WavePacket>& packets, const QuadSpec& spec, double mass,
                               double tolerance) {
  if (packets.empty()) throw InvalidArgument("lemma check needs at least one packet");
  if (sign == Sign::None) throw InvalidArgument("lemma check needs an energy sign");
  LemmaReport rep;
  rep.lemma = which;
  rep.channel = channel;
  rep.sign = sign;
  rep.tolerance = tolerance > 0 ? tolerance : (which == ShellLemma::A3 ? 1e-8 : 1e-7);
  const ShellFactor base =
      which == ShellLemma::A3 ? ShellFactor::delta(sign, mass) : ShellFactor::delta_prime(sign, mass);
  const DistExpr plain_expr = single_factor(base);
  for (size_t i = 0; i < packets.size(); ++i) {
    const SmearValue plain = smear(plain_expr, {packets[i]}, spec);
    for (double t : t_list) {
      const Multiplier mu = Multiplier::chi_d_t(channel, t, mass, Cutoff::standard(mass));
      const SmearValue mult = smear(apply_multiplier(plain_expr, 0, mu), {packets[i]}, spec);
      const double scale = std::max(std::abs(plain.value), 1e-300);
      LemmaCase c{static_cast<int>(i), t, plain.value, mult.value, std::abs(mult.value - plain.value) / scale,
                  plain.err_est + mult.err_est};
      rep.max_rel_dev = std::max(rep.max_rel_dev, c.rel_dev);
      rep.cases.push_back(c);
    }
  }
  rep.pass = rep.max_rel_dev <= rep.tolerance;
  return rep;
}

}  // namespace dipole
