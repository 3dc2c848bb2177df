#include "fslab/symbolic_poly.hpp"

#include <cmath>
#include <sstream>

namespace fslab {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw FslabError("non-finite scalar");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [1/2, 1)
  const auto mant_int =
      static_cast<long long>(std::ldexp(mant, 53));  // integral by construction
  Rational r(mant_int);
  const int shift = exp - 53;
  boost::multiprecision::cpp_int pow2 = boost::multiprecision::cpp_int(1)
                                        << std::abs(shift);
  if (shift >= 0) return r * Rational(pow2);
  return r / Rational(pow2);
}

UniPoly::UniPoly(Rational constant) {
  if (constant != 0) coeffs_.push_back(std::move(constant));
}

const Rational& UniPoly::coeff(int i) const {
  static const Rational zero(0);
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return zero;
  return coeffs_[i];
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

UniPoly& UniPoly::operator+=(const UniPoly& other) {
  if (other.coeffs_.size() > coeffs_.size())
    coeffs_.resize(other.coeffs_.size(), Rational(0));
  for (size_t i = 0; i < other.coeffs_.size(); ++i)
    coeffs_[i] += other.coeffs_[i];
  trim();
  return *this;
}

UniPoly UniPoly::scaled(const Rational& s) const {
  UniPoly out;
  if (s == 0) return out;
  out.coeffs_.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.coeffs_.push_back(c * s);
  out.trim();
  return out;
}

UniPoly UniPoly::times_mu() const {
  UniPoly out;
  if (coeffs_.empty()) return out;
  out.coeffs_.reserve(coeffs_.size() + 1);
  out.coeffs_.push_back(Rational(0));
  out.coeffs_.insert(out.coeffs_.end(), coeffs_.begin(), coeffs_.end());
  return out;
}

UniPoly UniPoly::times_affine(const Rational& a0, const Rational& a1) const {
  UniPoly out = scaled(a0);
  out += times_mu().scaled(a1);
  return out;
}

Rational UniPoly::eval(const Rational& mu) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * mu + *it;
  return acc;
}

double UniPoly::eval_double(double mu) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * mu + static_cast<double>(*it);
  return acc;
}

std::string UniPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) os << " + ";
    os << coeffs_[i] << "*mu^" << i;
  }
  return os.str();
}

int PolyVector::max_degree() const {
  int deg = -1;
  for (const auto& p : entries) deg = std::max(deg, p.degree());
  return deg;
}

Vec PolyVector::eval_double(double mu) const {
  Vec out(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) out(i) = entries[i].eval_double(mu);
  return out;
}

namespace {

struct FamilyExact {
  // Q_mu = Q0 + mu Q1 in rational form; q = q_coeff * (e1 + e2).
  std::vector<std::vector<Rational>> Q0, Q1;
  std::vector<Rational> q;
  int d;

  explicit FamilyExact(const SymbolicFamily& fam) : d(fam.d) {
    const Rational L = rational_from_double(fam.L);
    const Rational half(1, 2);
    Q0.assign(d, std::vector<Rational>(d, Rational(0)));
    Q1.assign(d, std::vector<Rational>(d, Rational(0)));
    Q0[0][0] = Q0[1][1] = L * half;
    Q0[0][1] = Q0[1][0] = -L * half;
    Q1[0][0] = Q1[1][1] = half;
    Q1[0][1] = Q1[1][0] = half;
    for (int i = 2; i < d; ++i) Q1[i][i] = Rational(1);
    q.assign(d, Rational(0));
    q[0] = q[1] = rational_from_double(fam.q_coeff);
  }
};

std::vector<UniPoly> mat_apply(const std::vector<std::vector<Rational>>& M,
                               const std::vector<UniPoly>& v) {
  const int d = static_cast<int>(v.size());
  std::vector<UniPoly> out(d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (M[r][c] != 0) out[r] += v[c].scaled(M[r][c]);
  return out;
}

std::vector<UniPoly> first_order_symbolic(const FamilyExact& fam,
                                          const std::vector<UniPoly>& v,
                                          const Rational& a, const Rational& b) {
  // a (Q0 v + mu Q1 v - q) + b v
  std::vector<UniPoly> out(fam.d);
  if (a != 0) {
    auto u0 = mat_apply(fam.Q0, v);
    auto u1 = mat_apply(fam.Q1, v);
    for (int r = 0; r < fam.d; ++r) {
      out[r] += u0[r].scaled(a);
      out[r] += u1[r].times_mu().scaled(a);
      out[r] += UniPoly(-a * fam.q[r]);
    }
  }
  if (b != 0)
    for (int r = 0; r < fam.d; ++r) out[r] += v[r].scaled(b);
  return out;
}

}  // namespace

PolyVector poly_combine(const SymbolicFamily& fam, const PolyVector& v,
                        const Rational& a, const Rational& b) {
  FamilyExact exact(fam);
  if (static_cast<int>(v.entries.size()) != fam.d)
    throw FslabError("dimension mismatch");
  PolyVector out;
  out.k = v.k + 1;
  out.entries = first_order_symbolic(exact, v.entries, a, b);
  return out;
}

PolyVector symbolic_run(const SymbolicFamily& fam, Schedule& schedule,
                        long long k, uint64_t seed) {
  if (schedule.reads_mu())
    throw FslabError("schedule reads mu; symbolic execution requires mu-blind schedules");
  FamilyExact exact(fam);
  const int d = fam.d;
  const int slots = schedule.num_slots();
  std::vector<std::vector<UniPoly>> state(slots, std::vector<UniPoly>(d));

  std::mt19937_64 rng(splitmix64(seed));
  for (long long it = 0; it < k; ++it) {
    StepPlan plan = schedule.plan(static_cast<int>(it), rng);
    std::vector<std::vector<UniPoly>> next(slots, std::vector<UniPoly>(d));
    for (int t = 0; t < slots; ++t) {
      const auto& sp = plan.slots.at(t);
      for (const auto& l : sp.lins) {
        const Rational b = rational_from_double(l.b);
        for (int r = 0; r < d; ++r) next[t][r] += state[l.src][r].scaled(b);
      }
      for (const auto& g : sp.grads) {
        auto ans = first_order_symbolic(exact, state[g.src],
                                        rational_from_double(g.a),
                                        rational_from_double(g.b));
        for (int r = 0; r < d; ++r) next[t][r] += ans[r];
      }
      for (const auto& c : sp.coords) {
        if (c.j < 2)
          throw FslabError(
              "coordinate oracle on a coupled coordinate is not polynomial in mu");
        // Answer equals the source point with coordinate j zeroed.
        for (int r = 0; r < d; ++r)
          if (r != c.j) next[t][r] += state[c.src][r];
      }
    }
    state = std::move(next);
  }

  PolyVector out;
  out.k = k;
  out.entries = std::move(state[0]);
  return out;
}

ExpectedPoly expected_first_coord(const SymbolicFamily& fam,
                                  const ScheduleFactory& factory, long long k,
                                  int trials, uint64_t master_seed) {
  if (trials < 1) throw FslabError("trials must be >= 1");
  std::vector<std::vector<Rational>> coeff_samples;  // per trial
  int max_len = 0;
  for (int t = 0; t < trials; ++t) {
    auto schedule = factory();
    PolyVector pv = symbolic_run(fam, *schedule, k,
                                 splitmix64(master_seed ^ (0x5157ULL + t)));
    const UniPoly& s = pv.entries.at(0);
    std::vector<Rational> coeffs;
    for (int i = 0; i <= s.degree(); ++i) coeffs.push_back(s.coeff(i));
    max_len = std::max<int>(max_len, static_cast<int>(coeffs.size()));
    coeff_samples.push_back(std::move(coeffs));
  }

  ExpectedPoly out;
  out.trials = trials;
  UniPoly mean;
  for (int i = 0; i < max_len; ++i) {
    Rational sum(0);
    double sum_d = 0.0, sum_sq = 0.0;
    for (const auto& sample : coeff_samples) {
      Rational c = i < static_cast<int>(sample.size()) ? sample[i] : Rational(0);
      sum += c;
      const double cd = static_cast<double>(c);
      sum_d += cd;
      sum_sq += cd * cd;
    }
    Rational m = sum / trials;
    UniPoly term(m);
    for (int p = 0; p < i; ++p) term = term.times_mu();
    mean += term;
    double var = 0.0;
    if (trials > 1) {
      var = (sum_sq - sum_d * sum_d / trials) / (trials - 1);
      var = std::max(0.0, var);
    }
    out.coeff_se.push_back(std::sqrt(var / trials));
  }
  out.mean = mean;
  return out;
}

EnvelopeReport envelope_margin(const UniPoly& s, double L, long long k) {
  if (s.degree() > k) throw FslabError("polynomial degree exceeds k");
  EnvelopeReport report;
  const int grid = 1000;
  for (double delta = L / 2.0; delta >= 1e-12; delta /= 2.0) {
    double min_ratio = std::numeric_limits<double>::infinity();
    double worst_mu = 0.0;
    bool ok = true;
    for (int g = 1; g <= grid; ++g) {
      const double mu = L - delta + delta * g / (grid + 1.0);
      const double lhs = std::abs(s.eval_double(mu) * mu + 1.0);
      const double rhs = std::pow(1.0 - mu / L, static_cast<double>(k + 1));
      const double ratio = rhs > 0.0
                               ? lhs / rhs
                               : std::numeric_limits<double>::infinity();
      if (ratio < min_ratio) {
        min_ratio = ratio;
        worst_mu = mu;
      }
      if (lhs < rhs) ok = false;
    }
    if (ok) {
      report.found = true;
      report.delta = delta;
      report.min_ratio = min_ratio;
      report.worst_mu = worst_mu;
      return report;
    }
    report.min_ratio = min_ratio;
    report.worst_mu = worst_mu;
  }
  return report;  // found == false: counterexample candidate
}

double suboptimality_envelope(double mu, double eps, double R, double L,
                              long long k) {
  if (!(0.0 < eps && eps < mu && mu < L))
    throw FslabError("need 0 < eps < mu < L");
  return (R * eps / (std::sqrt(2.0) * L)) *
         std::pow(1.0 - mu / L, static_cast<double>(k + 1));
}

}  // namespace fslab
