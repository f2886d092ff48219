#include "emm/big_real.hpp"

#include <climits>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace emm {

namespace {

constexpr mpfr_rnd_t kRound = MPFR_RNDN;

struct MpfrStringDeleter {
  void operator()(char* s) const { mpfr_free_str(s); }
};

}  // namespace

BigReal::BigReal() : BigReal(PrecisionBits{}) {}

BigReal::BigReal(PrecisionBits prec) {
  if (prec.bits < MPFR_PREC_MIN || prec.bits > MPFR_PREC_MAX) {
    throw std::invalid_argument("BigReal: precision out of range");
  }
  mpfr_init2(v_, prec.bits);
  mpfr_set_zero(v_, 1);
}

BigReal::BigReal(long value, PrecisionBits prec) : BigReal(prec) { mpfr_set_si(v_, value, kRound); }

BigReal::BigReal(double value, PrecisionBits prec) : BigReal(prec) { mpfr_set_d(v_, value, kRound); }

BigReal::BigReal(std::string_view text, PrecisionBits prec) : BigReal(prec) {
  const std::string s(text);
  char* end = nullptr;
  mpfr_strtofr(v_, s.c_str(), &end, 10, kRound);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::invalid_argument("BigReal: cannot parse '" + s + "'");
  }
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, kRound);
}

BigReal::BigReal(BigReal&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    }
    mpfr_set(v_, other.v_, kRound);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

void BigReal::set_precision(PrecisionBits prec) { mpfr_prec_round(v_, prec.bits, kRound); }

std::string BigReal::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return "0";
  mpfr_exp_t exp10 = 0;
  std::unique_ptr<char, MpfrStringDeleter> mant(
      mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits < 0 ? 0 : digits), v_, kRound));
  std::string m(mant.get());
  std::string out;
  if (!m.empty() && m.front() == '-') {
    out.push_back('-');
    m.erase(m.begin());
  }
  while (m.size() > 1 && m.back() == '0') m.pop_back();
  out.push_back(m.front());
  if (m.size() > 1) {
    out.push_back('.');
    out.append(m, 1, std::string::npos);
  }
  if (exp10 - 1 != 0) {
    out += "e" + std::to_string(static_cast<long>(exp10 - 1));
  }
  return out;
}

std::string BigReal::to_fixed(int decimals, mpfr_rnd_t rounding) const {
  const std::string fmt = "%." + std::to_string(decimals < 0 ? 0 : decimals) + "R*f";
  char* buf = nullptr;
  if (mpfr_asprintf(&buf, fmt.c_str(), rounding, v_) < 0) {
    throw std::runtime_error("BigReal: formatting failed");
  }
  std::unique_ptr<char, decltype(&mpfr_free_str)> guard(buf, &mpfr_free_str);
  return std::string(buf);
}

long BigReal::exponent() const {
  if (mpfr_zero_p(v_)) return LONG_MIN;
  return static_cast<long>(mpfr_get_exp(v_));
}

void BigReal::widen_to(const BigReal& other) {
  if (mpfr_get_prec(other.v_) > mpfr_get_prec(v_)) {
    mpfr_prec_round(v_, mpfr_get_prec(other.v_), kRound);
  }
}

BigReal& BigReal::operator+=(const BigReal& rhs) {
  widen_to(rhs);
  mpfr_add(v_, v_, rhs.v_, kRound);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  widen_to(rhs);
  mpfr_sub(v_, v_, rhs.v_, kRound);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  widen_to(rhs);
  mpfr_mul(v_, v_, rhs.v_, kRound);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  widen_to(rhs);
  mpfr_div(v_, v_, rhs.v_, kRound);
  return *this;
}

BigReal& BigReal::operator+=(long rhs) {
  mpfr_add_si(v_, v_, rhs, kRound);
  return *this;
}

BigReal& BigReal::operator-=(long rhs) {
  mpfr_sub_si(v_, v_, rhs, kRound);
  return *this;
}

BigReal& BigReal::operator*=(long rhs) {
  mpfr_mul_si(v_, v_, rhs, kRound);
  return *this;
}

BigReal& BigReal::operator/=(long rhs) {
  mpfr_div_si(v_, v_, rhs, kRound);
  return *this;
}

BigReal& BigReal::add_product(const BigReal& a, const BigReal& b) {
  widen_to(a);
  widen_to(b);
  mpfr_fma(v_, a.v_, b.v_, v_, kRound);
  return *this;
}

BigReal& BigReal::sub_product(const BigReal& a, const BigReal& b) {
  widen_to(a);
  widen_to(b);
  // -(a*b - this)
  mpfr_fms(v_, a.v_, b.v_, v_, kRound);
  mpfr_neg(v_, v_, kRound);
  return *this;
}

BigReal BigReal::operator-() const {
  BigReal r(*this);
  mpfr_neg(r.v_, r.v_, kRound);
  return r;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const BigReal& a, long b) {
  if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.v_, b);
  return c < 0 ? std::partial_ordering::less : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

BigReal abs(BigReal x) {
  mpfr_abs(x.raw(), x.raw(), kRound);
  return x;
}

BigReal sqrt(BigReal x) {
  mpfr_sqrt(x.raw(), x.raw(), kRound);
  return x;
}

BigReal hypot(const BigReal& a, const BigReal& b) {
  BigReal r(a.precision().bits >= b.precision().bits ? a.precision() : b.precision());
  mpfr_hypot(r.raw(), a.raw(), b.raw(), kRound);
  return r;
}

BigReal min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }

BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }

BigReal ldexp(BigReal x, long e) {
  mpfr_mul_2si(x.raw(), x.raw(), e, kRound);
  return x;
}

BigReal pow2(long e, PrecisionBits prec) {
  BigReal r(1L, prec);
  return ldexp(std::move(r), e);
}

std::ostream& operator<<(std::ostream& os, const BigReal& x) {
  const auto p = os.precision();
  return os << x.to_string(p > 0 ? static_cast<int>(p) : 0);
}

}  // namespace emm
