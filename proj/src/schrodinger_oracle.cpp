#include "emm/schrodinger_oracle.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

namespace emm {

namespace {

constexpr int kState = 12;  // psi, d psi / dE, d psi / d beta; each as (Re, Im, Re', Im')
using State = std::array<BigReal, kState>;

State zero_state(PrecisionBits prec) {
  State s;
  s.fill(BigReal(prec));
  return s;
}

// psi'' = (-E - i x^3) psi, split into real and imaginary parts.
void derivative(const BigReal& x3, const BigReal& e, const State& y, State& out) {
  for (int block = 0; block < 3; ++block) {
    const int o = 4 * block;
    out[o] = y[o + 2];
    out[o + 1] = y[o + 3];
    out[o + 2] = x3 * y[o + 1];
    out[o + 2].sub_product(e, y[o]);
    out[o + 3] = -(x3 * y[o]);
    out[o + 3].sub_product(e, y[o + 1]);
  }
  // d/dE of the equation adds -psi.
  out[6] -= y[0];
  out[7] -= y[1];
}

struct Integration {
  State end;
  BigReal max_modulus2;
  std::vector<BigReal> re, im;
};

class Integrator {
 public:
  Integrator(const OracleSettings& s) : prec_(s.precision) {
    steps_ = static_cast<long>(std::llround(s.half_length / s.step));
    if (steps_ < 8 || steps_ % 2 != 0 || std::abs(steps_ * s.step - s.half_length) > 1e-9 * s.half_length) {
      throw std::invalid_argument("schrodinger_oracle: L / h must be an even integer of at least 8");
    }
    h_ = BigReal(s.half_length, prec_) / steps_;
  }

  long steps() const { return steps_; }
  const BigReal& h() const { return h_; }

  Integration run(const BigReal& e, const BigReal& beta, bool keep_grid) const {
    State y = zero_state(prec_);
    y[0] = BigReal(1L, prec_);
    y[3] = beta;
    y[11] = BigReal(1L, prec_);  // d psi'(0) / d beta = i
    Integration out{zero_state(prec_), BigReal(1L, prec_), {}, {}};
    if (keep_grid) {
      out.re.reserve(static_cast<std::size_t>(steps_) + 1);
      out.im.reserve(static_cast<std::size_t>(steps_) + 1);
      out.re.push_back(y[0]);
      out.im.push_back(y[1]);
    }
    State k1 = zero_state(prec_), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
    const BigReal half = h_ / 2L;
    const BigReal sixth = h_ / 6L;
    for (long n = 0; n < steps_; ++n) {
      const BigReal x0 = h_ * BigReal(n, prec_);
      const BigReal xm = x0 + half;
      const BigReal x1 = h_ * BigReal(n + 1, prec_);
      const BigReal c0 = x0 * x0 * x0, cm = xm * xm * xm, c1 = x1 * x1 * x1;
      derivative(c0, e, y, k1);
      for (int i = 0; i < kState; ++i) (tmp[i] = y[i]).add_product(half, k1[i]);
      derivative(cm, e, tmp, k2);
      for (int i = 0; i < kState; ++i) (tmp[i] = y[i]).add_product(half, k2[i]);
      derivative(cm, e, tmp, k3);
      for (int i = 0; i < kState; ++i) (tmp[i] = y[i]).add_product(h_, k3[i]);
      derivative(c1, e, tmp, k4);
      for (int i = 0; i < kState; ++i) {
        BigReal sum = k2[i] + k3[i];
        sum *= 2L;
        sum += k1[i];
        sum += k4[i];
        y[i].add_product(sixth, sum);
      }
      BigReal mod2 = y[0] * y[0];
      mod2.add_product(y[1], y[1]);
      if (mod2 > out.max_modulus2) out.max_modulus2 = mod2;
      if (keep_grid) {
        out.re.push_back(y[0]);
        out.im.push_back(y[1]);
      }
    }
    out.end = std::move(y);
    return out;
  }

 private:
  PrecisionBits prec_;
  long steps_ = 0;
  BigReal h_;
};

BigReal mismatch(const Integration& r) { return hypot(r.end[0], r.end[1]) / sqrt(r.max_modulus2); }

}  // namespace

std::vector<BigReal> OracleSolution::density() const {
  std::vector<BigReal> s;
  s.reserve(re.size());
  for (std::size_t k = 0; k < re.size(); ++k) {
    BigReal v = re[k] * re[k];
    v.add_product(im[k], im[k]);
    s.push_back(std::move(v));
  }
  return s;
}

double wkb_energy(int level) {
  // E_n ~ [Gamma(11/6) sqrt(pi) (n + 1/2) / (sin(pi/3) Gamma(4/3))]^(6/5)
  const double pi = std::acos(-1.0);
  const double c = std::tgamma(11.0 / 6.0) * std::sqrt(pi) / (std::sin(pi / 3.0) * std::tgamma(4.0 / 3.0));
  return std::pow(c * (level + 0.5), 1.2);
}

OracleSolution shoot_eigenvalue(const BigReal& initial_e, const BigReal& initial_beta, const OracleSettings& s) {
  const PrecisionBits prec = s.precision;
  const Integrator integ(s);
  BigReal e = initial_e, beta = initial_beta;
  e.set_precision(prec);
  beta.set_precision(prec);
  const BigReal step_floor = pow2(-prec.bits / 2, prec);

  std::vector<std::pair<double, double>> trajectory;
  // Damping uses |psi(L)| itself: the relative mismatch saturates at 1 while the growing
  // solution dominates.
  Integration cur = integ.run(e, beta, false);
  BigReal merit = hypot(cur.end[0], cur.end[1]);
  for (int it = 1; it <= s.max_newton; ++it) {
    // J = d(Re psi(L), Im psi(L)) / d(E, beta)
    const BigReal& j11 = cur.end[4];
    const BigReal& j12 = cur.end[8];
    const BigReal& j21 = cur.end[5];
    const BigReal& j22 = cur.end[9];
    const BigReal det = j11 * j22 - j12 * j21;
    if (det.is_zero()) break;
    const BigReal de = -(j22 * cur.end[0] - j12 * cur.end[1]) / det;
    const BigReal db = -(j11 * cur.end[1] - j21 * cur.end[0]) / det;

    BigReal lambda(1L, prec);
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      BigReal te = e, tb = beta;
      te.add_product(lambda, de);
      tb.add_product(lambda, db);
      Integration trial = integ.run(te, tb, false);
      BigReal tmerit = hypot(trial.end[0], trial.end[1]);
      if (tmerit < merit) {
        e = std::move(te);
        beta = std::move(tb);
        cur = std::move(trial);
        merit = std::move(tmerit);
        accepted = true;
        break;
      }
      lambda /= 2L;
    }
    trajectory.emplace_back(e.to_double(), beta.to_double());
    const bool small_step = abs(de) <= step_floor * max(abs(e), BigReal(1L, prec));
    if ((!accepted || small_step) && mismatch(cur).to_double() <= s.match_tolerance) {
      Integration fin = integ.run(e, beta, true);
      OracleSolution sol;
      sol.energy = e;
      sol.beta = beta;
      sol.half_length = s.half_length;
      sol.step = s.step;
      sol.x.reserve(fin.re.size());
      for (long k = 0; k <= integ.steps(); ++k) sol.x.push_back(integ.h() * BigReal(k, prec));
      sol.re = std::move(fin.re);
      sol.im = std::move(fin.im);
      sol.end_mismatch = mismatch(fin).to_double();
      sol.newton_iterations = it;
      sol.residual = residual_check(sol, s);
      return sol;
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "shoot_eigenvalue: Newton did not converge from (E, beta) = (" << initial_e.to_string(10) << ", "
      << initial_beta.to_string(10) << "); last E = " << e.to_string(15) << ", |psi(L)|/max = " << mismatch(cur).to_string(4);
  throw NewtonDivergence(msg.str(), std::move(trajectory));
}

ResidualStats positivity_residual(const BigReal& x0, const BigReal& h, const std::vector<BigReal>& s,
                                  const BigReal& energy, double exclude_below, double floor_fraction) {
  if (s.size() < 9) throw std::invalid_argument("positivity_residual: need at least 9 samples");
  const PrecisionBits prec = h.precision();
  BigReal smax(prec);
  for (const auto& v : s) smax = max(smax, abs(v));
  const BigReal floor = smax * BigReal(floor_fraction, prec);
  const BigReal h2 = h * h, h3 = h2 * h, h4 = h3 * h;
  const BigReal excl(exclude_below, prec);

  ResidualStats st;
  double sum2 = 0.0;
  for (std::size_t k = 2; k + 2 < s.size(); ++k) {
    const BigReal x = x0 + h * BigReal(static_cast<long>(k), prec);
    if (x < excl || abs(s[k]) < floor) continue;
    const BigReal& sm2 = s[k - 2];
    const BigReal& sm1 = s[k - 1];
    const BigReal& s0 = s[k];
    const BigReal& sp1 = s[k + 1];
    const BigReal& sp2 = s[k + 2];
    const BigReal d1 = (sp1 - sm1) / (h * 2L);
    const BigReal d2 = (sp1 - s0 * 2L + sm1) / h2;
    const BigReal d3 = (sp2 - sp1 * 2L + sm1 * 2L - sm2) / (h3 * 2L);
    const BigReal d4 = (sp2 - sp1 * 4L + s0 * 6L - sm1 * 4L + sm2) / h4;
    const BigReal x3 = x * x * x;
    const std::array<BigReal, 5> terms{x * d4, d3 * -3L, energy * x * d2 * 4L, energy * d1 * -12L,
                                       x3 * x3 * x * s0 * -4L};
    BigReal total(prec), largest(prec);
    for (const auto& t : terms) {
      total += t;
      largest = max(largest, abs(t));
    }
    if (largest.is_zero()) continue;
    const double rel = (abs(total) / largest).to_double();
    st.max_relative = std::max(st.max_relative, rel);
    sum2 += rel * rel;
    ++st.points;
  }
  if (st.points > 0) st.rms_relative = std::sqrt(sum2 / static_cast<double>(st.points));
  return st;
}

ResidualStats residual_check(const OracleSolution& sol, const OracleSettings& settings) {
  if (sol.x.size() < 9) throw std::invalid_argument("residual_check: grid too coarse");
  const BigReal h = sol.x[1] - sol.x[0];
  return positivity_residual(sol.x[0], h, sol.density(), sol.energy, settings.residual_exclude,
                             settings.residual_floor);
}

namespace {

// Composite Simpson over samples f[0..n] with stride `stride` (n / stride even).
BigReal simpson(const std::vector<BigReal>& f, const BigReal& h, std::size_t stride) {
  const std::size_t n = (f.size() - 1) / stride;
  BigReal sum = f.front() + f[n * stride];
  for (std::size_t k = 1; k < n; ++k) sum += f[k * stride] * (k % 2 == 1 ? 4L : 2L);
  return sum * h * static_cast<long>(stride) / 3L;
}

}  // namespace

ReferenceMoments reference_moments(const OracleSolution& sol, int count, double tail_tolerance) {
  if (count < 4) throw std::invalid_argument("reference_moments: need at least u_0..u_3");
  const std::size_t n = sol.x.size() - 1;
  if (n < 4 || n % 4 != 0) throw std::invalid_argument("reference_moments: grid intervals must be a multiple of 4");
  const BigReal h = sol.x[1] - sol.x[0];
  const std::vector<BigReal> s = sol.density();
  const BigReal L = sol.x.back();

  ReferenceMoments out;
  std::vector<BigReal> f(s.size());
  for (int rho = 0; rho < count; ++rho) {
    BigReal peak(h.precision());
    for (std::size_t k = 0; k <= n; ++k) {
      BigReal w = s[k];
      for (int j = 0; j < 2 * rho; ++j) w *= sol.x[k];
      f[k] = w * 2L;
      peak = max(peak, f[k]);
    }
    const BigReal fine = simpson(f, h, 1);
    const BigReal coarse = simpson(f, h, 2);
    // The integrand at L, spread over a unit length, bounds the neglected tail.
    const double tail = (f.back() / fine).to_double();
    if (tail > tail_tolerance) {
      std::ostringstream msg;
      msg << "reference_moments: integrand for rho = " << rho << " not negligible at L = " << L.to_string(4)
          << " (relative " << tail << ")";
      throw std::invalid_argument(msg.str());
    }
    out.quadrature_error = std::max(out.quadrature_error, (abs(fine - coarse) / fine).to_double() / 15.0);
    out.u.push_back(fine);
  }
  BigReal norm = out.u[0] + out.u[1] + out.u[2] + out.u[3];
  for (auto& v : out.u) v /= norm;
  return out;
}

void write_grid(std::ostream& out, const OracleSolution& sol, int digits) {
  out << "# x Re(psi) Im(psi) S   E = " << sol.energy.to_string(digits) << "\n";
  const auto s = sol.density();
  for (std::size_t k = 0; k < sol.x.size(); ++k) {
    out << sol.x[k].to_string(digits) << ' ' << sol.re[k].to_string(digits) << ' ' << sol.im[k].to_string(digits)
        << ' ' << s[k].to_string(digits) << '\n';
  }
}

}  // namespace emm
