#include "ietlab/mixing.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <map>

#include "ietlab/verifier.hpp"

namespace ietlab {

namespace {

ExactScalar pow2_inv(int k) {
  if (k < 0 || k > 62) throw PreconditionError("dyadic level out of range: " + std::to_string(k));
  return ExactScalar::fraction(1, 1LL << k);
}

long long clamp_ll(const mpz_class& v) {
  if (v > static_cast<long>(LLONG_MAX)) return LLONG_MAX;
  if (v < static_cast<long>(LLONG_MIN + 1)) return LLONG_MIN + 1;
  return v.get_si();
}

}  // namespace

CorrelationReport correlation_with(const PiecewiseTranslation& t_minus_n, long long n,
                                   const IntervalSet& A, const IntervalSet& B) {
  CorrelationReport r{n, A, B, {}, {}, {}};
  r.value = intersect(t_minus_n.image(A), B).measure();
  r.target = A.measure() * B.measure();
  r.deviation = abs(r.value - r.target);
  return r;
}

CorrelationReport correlation(const IET& t, const IntervalSet& A, const IntervalSet& B, long long n) {
  return correlation_with(power(t, -n), n, A, B);
}

std::string DyadicLabel::str() const { return std::to_string(level) + ":" + std::to_string(index); }

std::vector<DyadicLabel> dyadic_family(int depth) {
  if (depth < 0 || depth > 20) throw PreconditionError("dyadic depth must be in [0, 20]");
  std::vector<DyadicLabel> out;
  for (int level = 0; level <= depth; ++level) {
    for (long long b = 0; b < (1LL << level); ++b) out.push_back({level, b});
  }
  return out;
}

std::vector<CorrelationRow> correlation_table(const IET& t, const std::vector<long long>& ns, int depth) {
  const auto family = dyadic_family(depth);
  std::vector<IntervalSet> sets;
  for (const auto& l : family) sets.emplace_back(l.interval());
  std::vector<CorrelationRow> rows;
  for (long long n : ns) {
    const PiecewiseTranslation p = power(t, -n);
    for (std::size_t a = 0; a < family.size(); ++a) {
      const IntervalSet img = p.image(sets[a]);
      const ExactScalar ma = sets[a].measure();
      for (std::size_t b = 0; b < family.size(); ++b) {
        CorrelationReport r{n, sets[a], sets[b], intersect(img, sets[b]).measure(),
                            ma * sets[b].measure(), {}};
        r.deviation = abs(r.value - r.target);
        rows.push_back({n, family[a], family[b], std::move(r)});
      }
    }
  }
  return rows;
}

MixingWindowResult mixing_window_check(const IET& t, long long j, long long k,
                                       const ExactScalar& eps, int depth) {
  if (j > k) throw PreconditionError("mixing window needs j <= k");
  const auto family = dyadic_family(depth);
  std::vector<IntervalSet> sets;
  for (const auto& l : family) sets.emplace_back(l.interval());
  MixingWindowResult res;
  for (long long n = j; n <= k; ++n) {
    const PiecewiseTranslation p = power(t, -n);
    for (std::size_t a = 0; a < family.size(); ++a) {
      const IntervalSet img = p.image(sets[a]);
      const ExactScalar ma = sets[a].measure();
      for (std::size_t b = 0; b < family.size(); ++b) {
        ++res.pairs_checked;
        const ExactScalar value = intersect(img, sets[b]).measure();
        const ExactScalar target = ma * sets[b].measure();
        const ExactScalar dev = abs(value - target);
        if (!(dev < eps)) {
          res.pass = false;
          res.witness = CorrelationRow{n, family[a], family[b],
                                       CorrelationReport{n, sets[a], sets[b], value, target, dev}};
          return res;
        }
      }
    }
  }
  return res;
}

int required_kappa(const ExactScalar& c) {
  if (c.sign() <= 0) throw PreconditionError("required_kappa needs c > 0");
  const ExactScalar quarter = c / ExactScalar(4);
  for (int kappa = 0; kappa <= 58; ++kappa) {
    if (pow2_inv(kappa) < quarter) return kappa;
  }
  throw PreconditionError("c = " + c.str() + " too small for a representable dyadic scale");
}

ExactScalar kappa_epsilon(int kappa) { return pow2_inv(kappa + 4); }

BlockWitness rigidity_blocks_mixing(const IET& t, const RigidityCertificate& cert) {
  if (!(t == cert.iet)) throw PreconditionError("certificate was issued for a different IET");
  const ExactScalar c = cert.A.measure();
  const int kappa = required_kappa(c);
  const ExactScalar thr = kappa_epsilon(kappa);
  if (cert.epsilon > thr) {
    throw PreconditionError("epsilon " + cert.epsilon.str() + " exceeds 2^-" +
                            std::to_string(kappa + 4) + " (kappa = " + std::to_string(kappa) +
                            " for c = " + c.str() + ")");
  }
  const VerificationReport vr = verify_certificate(cert, 0);
  if (!vr.ok) throw VerificationError("certificate does not verify: " + vr.failures.front());

  const ExactScalar unit = pow2_inv(kappa);
  const ExactScalar scale(1LL << kappa);
  std::map<long long, ExactScalar> mass;
  for (const auto& part : cert.A.parts()) {
    const long long first = (part.lo() * scale).floor().get_si();
    const long long last = -(-(part.hi() * scale)).floor().get_si();  // ceil
    for (long long b = first; b < last; ++b) {
      const ExactScalar lo = max(part.lo(), ExactScalar(b) * unit);
      const ExactScalar hi = min(part.hi(), ExactScalar(b + 1) * unit);
      if (lo < hi) mass[b] += hi - lo;
    }
  }
  const ExactScalar need = c * unit;
  std::vector<std::pair<long long, ExactScalar>> blocks;
  for (const auto& [b, m] : mass) {
    if (m >= need) blocks.emplace_back(b, m);
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });

  const PiecewiseTranslation p = power(t, cert.k);
  long long tried = 0;
  for (const auto& [b, m] : blocks) {
    ++tried;
    const Interval bar(max(ExactScalar(0), ExactScalar(b) * unit - thr),
                       min(ExactScalar(1), ExactScalar(b + 1) * unit + thr));
    const IntervalSet s(bar);
    const ExactScalar value = intersect(p.image(s), s).measure();
    const ExactScalar bound = ExactScalar(2) * bar.length() * bar.length();
    if (value > bound) return BlockWitness{kappa, thr, b, m, bar, cert.k, value, bound, tried};
  }
  throw VerificationError("no dyadic block at level " + std::to_string(kappa) +
                          " beats 2 lambda(I)^2 (" + std::to_string(blocks.size()) +
                          " blocks had mass >= " + need.str() + ")");
}

ThicknessFunction ThicknessFunction::parse(const std::string& name) {
  ThicknessFunction f;
  f.name_ = name;
  if (name == "pow_self" || name == "double" || name == "square") return f;
  const std::string prefix = "poly:";
  if (name.rfind(prefix, 0) != 0) throw ParseError("unknown function '" + name + "'");
  std::string_view rest(name);
  rest.remove_prefix(prefix.size());
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view tok = rest.substr(0, comma);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("bad polynomial coefficient '" + std::string(tok) + "'");
    }
    f.coeffs_.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return f;
}

long long ThicknessFunction::operator()(long long j) const {
  const mpz_class x(std::to_string(j));
  if (!coeffs_.empty()) {
    mpz_class acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = acc * x + mpz_class(std::to_string(*it));
      if (mpz_sizeinbase(acc.get_mpz_t(), 2) > 200) return acc > 0 ? LLONG_MAX : LLONG_MIN + 1;
    }
    return clamp_ll(acc);
  }
  if (name_ == "double") return clamp_ll(2 * x);
  if (name_ == "square") return clamp_ll(x * x);
  // pow_self: j^j for j >= 1; 16^16 already exceeds 63 bits.
  if (j < 1) throw PreconditionError("j^j needs j >= 1");
  if (j >= 16) return LLONG_MAX;
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(j));
  return clamp_ll(r);
}

ThicknessReport thickness_check(std::vector<long long> sequence, const ThicknessFunction& f,
                                long long min_witnesses) {
  if (!std::is_sorted(sequence.begin(), sequence.end())) {
    throw PreconditionError("sequence must be sorted ascending");
  }
  sequence.erase(std::unique(sequence.begin(), sequence.end()), sequence.end());
  ThicknessReport rep{sequence, f.name(), {}, min_witnesses, false};
  // run_end[i]: last value of the block of consecutive integers holding sequence[i]
  std::vector<long long> run_end(sequence.size());
  for (std::size_t i = sequence.size(); i-- > 0;) {
    const bool joined = i + 1 < sequence.size() && sequence[i + 1] == sequence[i] + 1;
    run_end[i] = joined ? run_end[i + 1] : sequence[i];
  }
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const long long j = sequence[i];
    const long long fj = f(j);
    if (fj >= j && fj <= run_end[i]) rep.witnesses.push_back(j);
  }
  rep.pass = static_cast<long long>(rep.witnesses.size()) >= min_witnesses;
  return rep;
}

}  // namespace ietlab
