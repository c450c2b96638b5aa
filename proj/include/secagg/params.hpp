#ifndef SECAGG_PARAMS_HPP
#define SECAGG_PARAMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace secagg {

// Protocol variants. "semi-honest" tolerates an honest-but-curious server,
// "malicious" adds the signed dropout-list consistency round, "lisa-plus"
// additionally lets every user verify the published aggregate against
// homomorphic commitments.
enum class Mode { kSemiHonest, kMalicious, kIntegrity };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kSemiHonest: return "semi-honest";
    case Mode::kMalicious: return "malicious";
    case Mode::kIntegrity: return "lisa-plus";
  }
  throw std::logic_error("mode_name: bad mode");
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "semi-honest") return Mode::kSemiHonest;
  if (s == "malicious") return Mode::kMalicious;
  if (s == "lisa-plus") return Mode::kIntegrity;
  throw std::invalid_argument("unknown mode: " + s +
                              " (expected semi-honest|malicious|lisa-plus)");
}

// Mask modulus: 0 encodes 2^64, anything else is the literal value.
inline constexpr uint64_t kModulus64 = 0;
inline constexpr uint64_t kModulus32 = uint64_t(1) << 32;

inline std::string modulus_to_string(uint64_t modulus) {
  if (modulus == kModulus64) return "18446744073709551616";
  return std::to_string(modulus);
}

inline uint64_t modulus_from_string(const std::string& s) {
  if (s == "18446744073709551616") return kModulus64;
  size_t pos = 0;
  unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size() || v == 0)
    throw std::invalid_argument("bad modulus: " + s);
  return uint64_t(v);
}

struct ProtocolParams {
  uint64_t n = 0;                // number of users
  uint64_t m = 1;                // input vector length
  uint64_t modulus = kModulus32; // mask modulus (0 = 2^64)
  double gamma = 0.0;            // assumed corruption rate
  double delta = 0.0;            // assumed dropout rate
  double alpha = 0.5;            // committee aborts if |U'_2| < alpha*n
  uint32_t eta = 20;             // correctness parameter (bits)
  uint32_t lambda = 40;          // security parameter (bits)
  uint32_t k = 0;                // committee size
  uint32_t ell = 0;              // backup neighborhood size
  uint32_t t = 0;                // Shamir threshold
  uint32_t c_tilde = 0;          // tolerated corrupt committee members
  double gamma_tilde = 0.0;      // c_tilde = floor(gamma_tilde * k)
  double beta = 0.0;             // t = ceil(beta * ell)
  Mode mode = Mode::kSemiHonest;

  double gamma_prime() const { return gamma * double(n) / double(n - 1); }

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::invalid_argument("invalid parameters: " + what);
    };
    if (n < 2) fail("n >= 2");
    if (m < 1) fail("m >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("0 <= gamma < 1");
    if (!(delta >= 0.0 && delta < 1.0)) fail("0 <= delta < 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) fail("0 < alpha <= 1");
    if (k < 1 || k > n) fail("1 <= k <= n");
    if (ell < 1 || ell > n - 1) fail("1 <= ell <= n-1");
    if (t < 1 || t > ell) fail("1 <= t <= ell");
    if (c_tilde >= k) fail("c_tilde < k");
    if (!(gamma < gamma_tilde && gamma_tilde < 1.0 - delta))
      fail("gamma < gamma_tilde < 1 - delta");
    if (c_tilde != uint32_t(gamma_tilde * double(k)))
      fail("c_tilde = floor(gamma_tilde * k)");
    double lo = mode == Mode::kSemiHonest ? gamma_prime()
                                          : 0.5 * (1.0 + gamma_prime());
    if (!(lo < beta && beta < 1.0 - delta))
      fail(mode == Mode::kSemiHonest
               ? "gamma*n/(n-1) < beta < 1 - delta"
               : "(1 + gamma*n/(n-1))/2 < beta < 1 - delta");
    if (t != uint32_t(std::ceil(beta * double(ell))))
      fail("t = ceil(beta * ell)");
    if (1.0 - 2.0 * delta - gamma_prime() <= 0.0)
      fail("1 - 2*delta - gamma*n/(n-1) > 0");
  }
};

// ---------------------------------------------------------------------------
// Hypergeometric tails.

// Exponential upper bound exp(-2 * deviation^2 * n_draws) on
// P[X >= E[X] + deviation * n_draws], clamped to [0, 1].
inline double hg_tail_bound(uint64_t n_draws, double deviation) {
  if (deviation < 0.0)
    throw std::invalid_argument("hg_tail_bound: negative deviation");
  double v = std::exp(-2.0 * deviation * deviation * double(n_draws));
  return std::min(1.0, std::max(0.0, v));
}

namespace detail {

inline double lchoose(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

inline double hg_log_pmf(uint64_t N, uint64_t C, uint64_t n, uint64_t x) {
  return lchoose(double(C), double(x)) +
         lchoose(double(N - C), double(n - x)) -
         lchoose(double(N), double(n));
}

}  // namespace detail

// Exact upper tail P[X >= x] for X ~ HG(N, C, n): x successes among n draws
// without replacement from a population of N with C successes. Evaluated in
// log space with the pmf ratio recurrence, summing from the side where terms
// decay so no intermediate exceeds the starting term.
inline double hg_tail_exact(uint64_t N, uint64_t C, uint64_t n, uint64_t x) {
  if (C > N || n > N) throw std::invalid_argument("hg_tail_exact: need C <= N, n <= N");
  uint64_t lo = (n + C > N) ? n + C - N : 0;  // support minimum
  uint64_t hi = std::min(C, n);               // support maximum
  if (x <= lo) return 1.0;
  if (x > hi) return 0.0;
  // Sum of pmf-ratio products, anchored at `from` and stepping away from the
  // distribution's mode so every ratio is <= 1.
  auto series = [&](uint64_t from, bool upward) {
    double scale = 0.0, term = 1.0, acc = 1.0;
    uint64_t i = from;
    for (;;) {
      if (upward) {
        if (i >= hi) break;
        double r = (double(C - i) * double(n - i)) /
                   (double(i + 1) * double(N - C - n + i + 1));
        term *= r;
        i++;
      } else {
        if (i <= lo) break;
        double r = (double(i) * double(N - C - n + i)) /
                   (double(C - i + 1) * double(n - i + 1));
        term *= r;
        i--;
      }
      acc += term;
      if (term < acc * 1e-18) break;
      if (acc > 1e280) {  // defensive rescale; ratios <= 1 should prevent this
        scale += std::log(acc);
        term /= acc;
        acc = 1.0;
      }
    }
    return std::log(acc) + scale;
  };
  uint64_t mode = uint64_t((double(n + 1) * double(C + 1)) / double(N + 2));
  if (x > mode) {
    double log_tail = detail::hg_log_pmf(N, C, n, x) + series(x, true);
    return std::min(1.0, std::exp(log_tail));
  }
  // Left of the mode the complement is the numerically stable side.
  double log_head = detail::hg_log_pmf(N, C, n, x - 1) + series(x - 1, false);
  double head = std::exp(log_head);
  return head >= 1.0 ? 0.0 : 1.0 - head;
}

// ---------------------------------------------------------------------------
// Failure functionals. The correctness event is "too many dropouts somewhere":
// more than k - c_tilde of the committee, or more than ell - t of some
// neighborhood. The security event is "too many corruptions somewhere": more
// than c_tilde of the committee, or enough of some neighborhood that two
// server-chosen share subsets of size t can differ only in corrupt parties
// (malicious: > 2t - ell), respectively reach the threshold (semi-honest:
// >= t).

enum class BindingTerm {
  kCommitteeCorrectness,
  kNeighborhoodCorrectness,
  kCommitteeSecurity,
  kNeighborhoodSecurity,
};

inline std::string binding_term_name(BindingTerm b) {
  switch (b) {
    case BindingTerm::kCommitteeCorrectness: return "committee-correctness";
    case BindingTerm::kNeighborhoodCorrectness: return "neighborhood-correctness";
    case BindingTerm::kCommitteeSecurity: return "committee-security";
    case BindingTerm::kNeighborhoodSecurity: return "neighborhood-security";
  }
  throw std::logic_error("binding_term_name: bad term");
}

struct BoundReport {
  double correctness_failure = 0.0;
  double security_failure = 0.0;
  BindingTerm binding_constraint = BindingTerm::kCommitteeCorrectness;
};

namespace detail {

// The four tail terms, evaluated either from the exponential bound using the
// continuous grid values (gamma_tilde, beta) or exactly using the integer
// thresholds (c_tilde, t). Committee draws are k of n users; neighborhood
// draws are ell of the n-1 other users.
struct TailTerms {
  double corr_committee, corr_neighborhood;  // neighborhood term already *k
  double sec_committee, sec_neighborhood;
};

inline TailTerms tail_terms(const ProtocolParams& p, bool use_exact) {
  TailTerms t{};
  double gp = p.gamma_prime();
  uint64_t dropouts = uint64_t(p.delta * double(p.n));
  uint64_t corrupt = uint64_t(p.gamma * double(p.n));
  if (use_exact) {
    t.corr_committee = hg_tail_exact(p.n, dropouts, p.k, p.k - p.c_tilde);
    t.corr_neighborhood =
        double(p.k) * hg_tail_exact(p.n - 1, dropouts, p.ell, p.ell - p.t);
    t.sec_committee = hg_tail_exact(p.n, corrupt, p.k, uint64_t(p.c_tilde) + 1);
    if (p.mode == Mode::kSemiHonest) {
      t.sec_neighborhood =
          double(p.k) * hg_tail_exact(p.n - 1, corrupt, p.ell, p.t);
    } else {
      uint64_t thresh = 2 * uint64_t(p.t) >= uint64_t(p.ell)
                            ? 2 * uint64_t(p.t) - p.ell + 1
                            : 0;
      t.sec_neighborhood =
          double(p.k) * hg_tail_exact(p.n - 1, corrupt, p.ell, thresh);
    }
  } else {
    t.corr_committee = hg_tail_bound(p.k, 1.0 - p.delta - p.gamma_tilde);
    t.corr_neighborhood =
        double(p.k) * hg_tail_bound(p.ell, 1.0 - gp - p.beta);
    t.sec_committee = hg_tail_bound(p.k, p.gamma_tilde - p.gamma);
    double dev = p.mode == Mode::kSemiHonest ? p.beta - gp
                                             : 2.0 * p.beta - gp - 1.0;
    t.sec_neighborhood = double(p.k) * hg_tail_bound(p.ell, dev);
  }
  return t;
}

}  // namespace detail

inline double correctness_failure(const ProtocolParams& p, bool use_exact) {
  p.validate();
  auto t = detail::tail_terms(p, use_exact);
  return t.corr_committee + t.corr_neighborhood;
}

inline double security_failure(const ProtocolParams& p, bool use_exact) {
  p.validate();
  auto t = detail::tail_terms(p, use_exact);
  return t.sec_committee + t.sec_neighborhood;
}

inline BoundReport bound_report(const ProtocolParams& p, bool use_exact) {
  p.validate();
  auto t = detail::tail_terms(p, use_exact);
  BoundReport r;
  r.correctness_failure = t.corr_committee + t.corr_neighborhood;
  r.security_failure = t.sec_committee + t.sec_neighborhood;
  double worst = t.corr_committee;
  r.binding_constraint = BindingTerm::kCommitteeCorrectness;
  auto consider = [&](double v, BindingTerm b) {
    if (v > worst) {
      worst = v;
      r.binding_constraint = b;
    }
  };
  consider(t.corr_neighborhood, BindingTerm::kNeighborhoodCorrectness);
  consider(t.sec_committee, BindingTerm::kCommitteeSecurity);
  consider(t.sec_neighborhood, BindingTerm::kNeighborhoodSecurity);
  return r;
}

// ---------------------------------------------------------------------------
// Planner: smallest k, then smallest ell, then smallest t such that
// correctness_failure <= 2^-eta and security_failure <= 2^-lambda, searching
// gamma_tilde and beta over 0.001 grids inside their admissible intervals.

namespace detail {

inline constexpr int kGridDenom = 1000;

struct GridRange {
  int lo, hi;  // inclusive grid indices; value = idx / kGridDenom
  bool empty() const { return lo > hi; }
};

// Open interval (a, b) mapped to grid indices.
inline GridRange open_interval(double a, double b) {
  int lo = int(std::floor(a * kGridDenom)) + 1;
  while ((double(lo) / kGridDenom) <= a) lo++;
  int hi = int(std::ceil(b * kGridDenom)) - 1;
  while ((double(hi) / kGridDenom) >= b) hi--;
  return GridRange{lo, hi};
}

struct PlanCandidate {
  uint32_t ell, t;
  int g_idx, b_idx;  // winning grid indices
};

// Per-candidate evaluator. For a fixed k it searches (gamma_tilde, beta, ell)
// for the lexicographically smallest (ell, t). Every sweep exploits the same
// crossing structure: the correctness-side requirement grows and the
// security-side requirement shrinks along each grid axis, so minima of their
// maximum sit at the crossing and monotone predicates admit binary search.
class Planner {
 public:
  Planner(const ProtocolParams& base, bool use_exact)
      : base_(base), use_exact_(use_exact) {
    target_corr_ = std::exp2(-double(base.eta));
    target_sec_ = std::exp2(-double(base.lambda));
    gp_ = base.gamma_prime();
    dropouts_ = uint64_t(base.delta * double(base.n));
    corrupt_ = uint64_t(base.gamma * double(base.n));
    max_ell_ = uint32_t(std::min<uint64_t>(base.n - 1, UINT32_MAX));
    g_range_ = open_interval(base.gamma, 1.0 - base.delta);
    double b_lo = base.mode == Mode::kSemiHonest ? gp_ : 0.5 * (1.0 + gp_);
    b_range_ = open_interval(b_lo, 1.0 - base.delta);
  }

  bool feasible_precondition() const {
    return !g_range_.empty() && !b_range_.empty();
  }

  // Smallest feasible (ell, t) for this k, if any.
  std::optional<PlanCandidate> best_for_k(uint32_t k) const {
    auto win = gamma_window(k);
    if (!win) return std::nullopt;
    std::optional<PlanCandidate> witness;
    for (int g = win->lo; g <= win->hi; g++) {
      auto bud = budgets(k, g);
      if (!bud) continue;
      auto got = min_ell_for_budgets(k, bud->first, bud->second);
      if (got && (!witness || got->first < witness->ell))
        witness = PlanCandidate{got->first, threshold_t(got->first, got->second),
                                g, got->second};
    }
    if (!witness) return std::nullopt;
    uint32_t ell = witness->ell;
    // Smallest t at (k, ell): slide beta upward from the interval floor and
    // take the first beta whose neighborhood tails fit under some
    // gamma_tilde; among those, the smallest gamma_tilde.
    for (int b = b_range_.lo; b <= witness->b_idx; b++) {
      uint32_t t = threshold_t(ell, b);
      if (t < 1 || t > ell) continue;
      auto [nc, ns] = neighborhood(k, ell, b);
      int g = smallest_gamma(k, *win, nc, ns);
      if (g >= 0) return PlanCandidate{ell, t, g, b};
    }
    return witness;  // the verified triple itself
  }

  ProtocolParams finish(uint32_t k, const PlanCandidate& c) const {
    ProtocolParams p = base_;
    p.k = k;
    p.ell = c.ell;
    p.t = c.t;
    p.gamma_tilde = double(c.g_idx) / kGridDenom;
    p.beta = double(c.b_idx) / kGridDenom;
    p.c_tilde = uint32_t(p.gamma_tilde * double(k));
    return p;
  }

 private:
  uint32_t threshold_t(uint32_t ell, int b_idx) const {
    return uint32_t(std::ceil(double(b_idx) / kGridDenom * double(ell)));
  }

  // Committee tails at (k, gamma_tilde).
  std::pair<double, double> committee(uint32_t k, int g_idx) const {
    double gt = double(g_idx) / kGridDenom;
    uint32_t c_tilde = uint32_t(gt * double(k));
    if (use_exact_) {
      return {hg_tail_exact(base_.n, dropouts_, k, k - c_tilde),
              hg_tail_exact(base_.n, corrupt_, k, uint64_t(c_tilde) + 1)};
    }
    return {hg_tail_bound(k, 1.0 - base_.delta - gt),
            hg_tail_bound(k, gt - base_.gamma)};
  }

  // Remaining tail budget after the committee terms; nullopt if either
  // target is already exceeded by the committee term alone.
  std::optional<std::pair<double, double>> budgets(uint32_t k,
                                                   int g_idx) const {
    auto [cc, sc] = committee(k, g_idx);
    if (cc >= target_corr_ || sc >= target_sec_) return std::nullopt;
    return std::make_pair(target_corr_ - cc, target_sec_ - sc);
  }

  // Grid gamma_tilde values whose committee terms leave positive budgets.
  // The correctness term rises and the security term falls with gamma_tilde,
  // so the admissible set is a contiguous window.
  std::optional<GridRange> gamma_window(uint32_t k) const {
    if (g_range_.empty()) return std::nullopt;
    auto corr_ok = [&](int g) { return committee(k, g).first < target_corr_; };
    auto sec_ok = [&](int g) { return committee(k, g).second < target_sec_; };
    if (!corr_ok(g_range_.lo) || !sec_ok(g_range_.hi)) return std::nullopt;
    // Last index where correctness still fits (prefix-true predicate).
    int lo = g_range_.lo, hi = g_range_.hi;
    while (lo < hi) {
      int mid = lo + (hi - lo + 1) / 2;
      if (corr_ok(mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    int g_max = lo;
    // First index where security fits (suffix-true predicate).
    lo = g_range_.lo, hi = g_range_.hi;
    while (lo < hi) {
      int mid = lo + (hi - lo) / 2;
      if (sec_ok(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    int g_min = lo;
    if (g_min > g_max) return std::nullopt;
    return GridRange{g_min, g_max};
  }

  // Neighborhood tails at (k, ell, beta-index), already multiplied by k.
  std::pair<double, double> neighborhood(uint32_t k, uint32_t ell,
                                         int b_idx) const {
    double beta = double(b_idx) / kGridDenom;
    double nc, ns;
    if (use_exact_) {
      uint32_t t = threshold_t(ell, b_idx);
      nc = double(k) * hg_tail_exact(base_.n - 1, dropouts_, ell, ell - t);
      if (base_.mode == Mode::kSemiHonest) {
        ns = double(k) * hg_tail_exact(base_.n - 1, corrupt_, ell, t);
      } else {
        uint64_t thresh = 2 * uint64_t(t) >= ell ? 2 * uint64_t(t) - ell + 1 : 0;
        ns = double(k) * hg_tail_exact(base_.n - 1, corrupt_, ell, thresh);
      }
    } else {
      nc = double(k) * hg_tail_bound(ell, 1.0 - gp_ - beta);
      double dev = base_.mode == Mode::kSemiHonest ? beta - gp_
                                                   : 2.0 * beta - gp_ - 1.0;
      ns = double(k) * hg_tail_bound(ell, dev);
    }
    return {nc, ns};
  }

  // Smallest ell whose tail meets `budget` at fixed beta; UINT64_MAX if none
  // fits within n-1. `sec` selects the security tail, else correctness.
  uint64_t min_ell_one(uint32_t k, int b_idx, double budget, bool sec) const {
    double beta = double(b_idx) / kGridDenom;
    double dev = sec ? (base_.mode == Mode::kSemiHonest ? beta - gp_
                                                        : 2.0 * beta - gp_ - 1.0)
                     : 1.0 - gp_ - beta;
    if (dev <= 0.0) return UINT64_MAX;
    // Closed form for the exponential bound: k * exp(-2 dev^2 ell) <= budget.
    double need =
        (std::log(double(k)) - std::log(budget)) / (2.0 * dev * dev);
    uint64_t ell_b = need <= 1.0 ? 1 : uint64_t(std::ceil(need));
    auto ok = [&](uint32_t ell) {
      uint32_t t = threshold_t(ell, b_idx);
      if (t < 1 || t > ell) return false;
      auto [nc, ns] = neighborhood(k, ell, b_idx);
      return (sec ? ns : nc) <= budget;
    };
    if (!use_exact_) {
      uint32_t ell = uint32_t(std::min<uint64_t>(ell_b, max_ell_));
      while (ell <= max_ell_ && !ok(ell)) ell++;  // integer-threshold nudge
      return ell <= max_ell_ ? ell : UINT64_MAX;
    }
    // The bound dominates the exact tail, so ell_b is an upper start. The
    // integer threshold t = ceil(beta*ell) makes the tails sawtoothed in
    // ell, so the binary search is followed by a verify-and-polish step.
    uint32_t start = uint32_t(std::min<uint64_t>(ell_b, max_ell_));
    while (start <= max_ell_ && !ok(start)) start++;
    if (start > max_ell_) return UINT64_MAX;
    uint32_t lo = 1, hi = start;
    while (lo < hi) {
      uint32_t mid = lo + (hi - lo) / 2;
      if (ok(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    while (hi < start && !ok(hi)) hi++;  // climb out of a sawtooth dent
    while (hi > 1 && ok(hi - 1)) hi--;
    return hi;
  }

  // Smallest ell verified to meet both neighborhood budgets at a common
  // beta, minimized over beta. With lc(beta) nondecreasing and ls(beta)
  // nonincreasing, the minimum of max(lc, ls) sits at the first beta where
  // lc >= ls or just before it; each candidate is then re-checked at its own
  // (ell, beta) since the per-term minima ride a sawtooth. Returns the ell
  // and the witnessing beta index.
  std::optional<std::pair<uint32_t, int>> min_ell_for_budgets(
      uint32_t k, double budget_c, double budget_s) const {
    auto lc = [&](int b) { return min_ell_one(k, b, budget_c, false); };
    auto ls = [&](int b) { return min_ell_one(k, b, budget_s, true); };
    auto both_ok = [&](uint32_t ell, int b) {
      uint32_t t = threshold_t(ell, b);
      if (t < 1 || t > ell) return false;
      auto [nc, ns] = neighborhood(k, ell, b);
      return nc <= budget_c && ns <= budget_s;
    };
    int lo = b_range_.lo, hi = b_range_.hi;
    int first = hi + 1;
    {
      int a = lo, c = hi;
      while (a <= c) {
        int mid = a + (c - a) / 2;
        if (lc(mid) >= ls(mid)) {
          first = mid;
          c = mid - 1;
        } else {
          a = mid + 1;
        }
      }
    }
    std::optional<std::pair<uint32_t, int>> best;
    auto consider = [&](int b) {
      if (b < lo || b > hi) return;
      uint64_t e = std::max(lc(b), ls(b));
      if (e == UINT64_MAX) return;
      uint32_t ell = uint32_t(e);
      while (ell <= max_ell_ && !both_ok(ell, b)) ell++;  // sawtooth nudge
      if (ell > max_ell_) return;
      if (!best || ell < best->first) best = std::make_pair(ell, b);
    };
    for (int b = first - 3; b <= first + 3; b++) consider(b);
    if (first > hi) consider(hi);
    return best;
  }

  // Smallest grid gamma_tilde in `win` whose budgets cover the neighborhood
  // tails (nc, ns), or -1. budget_c falls and budget_s rises with
  // gamma_tilde, so both conditions are one-sided.
  int smallest_gamma(uint32_t k, GridRange win, double nc, double ns) const {
    auto fits_c = [&](int g) {
      auto b = budgets(k, g);
      return b && nc <= b->first;
    };
    auto fits_s = [&](int g) {
      auto b = budgets(k, g);
      return b && ns <= b->second;
    };
    if (!fits_c(win.lo) || !fits_s(win.hi)) return -1;
    int lo = win.lo, hi = win.hi;
    while (lo < hi) {  // last g with correctness budget intact
      int mid = lo + (hi - lo + 1) / 2;
      if (fits_c(mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    int g_max = lo;
    lo = win.lo, hi = win.hi;
    while (lo < hi) {  // first g with security budget intact
      int mid = lo + (hi - lo) / 2;
      if (fits_s(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo <= g_max ? lo : -1;
  }

  ProtocolParams base_;
  bool use_exact_;
  double target_corr_, target_sec_, gp_;
  uint64_t dropouts_, corrupt_;
  uint32_t max_ell_;
  GridRange g_range_, b_range_;
};

}  // namespace detail

// Chooses (k, ell, t, c_tilde, gamma_tilde, beta) for the given population,
// rates, and failure targets. `base` carries n, m, modulus, gamma, delta,
// alpha, eta, lambda, and mode; the planned fields are filled in. Throws if
// the rates are infeasible (2*delta + gamma*n/(n-1) >= 1) or if no parameters
// within k <= n, ell <= n-1 meet the targets.
inline ProtocolParams plan_params(const ProtocolParams& base, bool use_exact) {
  if (base.n < 2) throw std::invalid_argument("plan_params: n >= 2 required");
  if (base.m < 1) throw std::invalid_argument("plan_params: m >= 1 required");
  if (!(base.gamma >= 0.0 && base.gamma < 1.0) ||
      !(base.delta >= 0.0 && base.delta < 1.0))
    throw std::invalid_argument("plan_params: rates must lie in [0, 1)");
  if (1.0 - 2.0 * base.delta - base.gamma_prime() <= 0.0)
    throw std::invalid_argument(
        "plan_params: infeasible rates (need 2*delta + gamma*n/(n-1) < 1)");
  detail::Planner planner(base, use_exact);
  if (!planner.feasible_precondition())
    throw std::invalid_argument("plan_params: empty parameter grid");

  uint32_t n_cap = uint32_t(std::min<uint64_t>(base.n, UINT32_MAX));
  // Feasibility is monotone in k in the planning regime; binary search, then
  // sweep a small window downward to absorb integer-rounding wiggle.
  uint32_t lo = 1, hi = n_cap;
  if (!planner.best_for_k(n_cap))
    throw std::invalid_argument("plan_params: no feasible parameters");
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (planner.best_for_k(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  uint32_t k = hi;
  for (uint32_t probe = k; probe + 8 >= k && probe >= 1; probe--) {
    if (planner.best_for_k(probe)) k = probe;
    if (probe == 1) break;
  }
  auto cand = planner.best_for_k(k);
  if (!cand) throw std::logic_error("plan_params: lost candidate");
  ProtocolParams p = planner.finish(k, *cand);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization.

inline nlohmann::json params_to_json(const ProtocolParams& p) {
  return nlohmann::json{
      {"n", p.n},
      {"m", p.m},
      {"modulus", modulus_to_string(p.modulus)},
      {"gamma", p.gamma},
      {"delta", p.delta},
      {"alpha", p.alpha},
      {"eta", p.eta},
      {"lambda", p.lambda},
      {"k", p.k},
      {"ell", p.ell},
      {"t", p.t},
      {"c_tilde", p.c_tilde},
      {"gamma_tilde", p.gamma_tilde},
      {"beta", p.beta},
      {"mode", mode_name(p.mode)},
  };
}

inline ProtocolParams params_from_json(const nlohmann::json& j) {
  ProtocolParams p;
  p.n = j.at("n").get<uint64_t>();
  p.m = j.at("m").get<uint64_t>();
  if (j.contains("modulus")) {
    if (j.at("modulus").is_string())
      p.modulus = modulus_from_string(j.at("modulus").get<std::string>());
    else
      p.modulus = j.at("modulus").get<uint64_t>();
  }
  p.gamma = j.at("gamma").get<double>();
  p.delta = j.at("delta").get<double>();
  p.alpha = j.value("alpha", 0.5);
  p.eta = j.value("eta", 20u);
  p.lambda = j.value("lambda", 40u);
  p.k = j.at("k").get<uint32_t>();
  p.ell = j.at("ell").get<uint32_t>();
  p.t = j.at("t").get<uint32_t>();
  p.c_tilde = j.at("c_tilde").get<uint32_t>();
  p.gamma_tilde = j.at("gamma_tilde").get<double>();
  p.beta = j.at("beta").get<double>();
  p.mode = mode_from_name(j.at("mode").get<std::string>());
  return p;
}

inline nlohmann::json bound_report_to_json(const BoundReport& r) {
  return nlohmann::json{
      {"correctness_failure", r.correctness_failure},
      {"security_failure", r.security_failure},
      {"binding_constraint", binding_term_name(r.binding_constraint)},
  };
}

}  // namespace secagg

#endif  // SECAGG_PARAMS_HPP
