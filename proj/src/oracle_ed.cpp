#include "tqsb/oracle_ed.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "tqsb/error.hpp"

namespace tqsb {

namespace {

// Qubit index q: bit 0 is qubit 1, bit 1 is qubit 2; a set bit means spin
// down (sz = -1).
constexpr int kQubitStates = 4;

int sz_of(int q, int qubit) { return (q >> qubit) & 1 ? -1 : 1; }

long long count_configs(int n_modes, const TruncationSpec& t) {
  if (!t.total_cap) {
    long long n = 1;
    for (int k = 0; k < n_modes; ++k) {
      n *= t.n_max + 1;
      if (n > kMaxEdDimension) return n;
    }
    return n;
  }
  const int cap = std::min(*t.total_cap, n_modes * t.n_max);
  // ways[c] = configurations of the modes seen so far with total c
  std::vector<long long> ways(static_cast<std::size_t>(cap) + 1, 0);
  ways[0] = 1;
  for (int k = 0; k < n_modes; ++k) {
    std::vector<long long> next(ways.size(), 0);
    for (int c = 0; c <= cap; ++c) {
      for (int n = 0; n <= t.n_max && c + n <= cap; ++n) next[c + n] += ways[c];
    }
    ways = std::move(next);
  }
  long long total = 0;
  for (long long w : ways) total += w;
  return total;
}

// Truncated Fock basis with raising-neighbour table.
struct FockBasis {
  int n_modes = 0;
  std::vector<std::vector<int>> occupation;  // per configuration
  std::vector<long long> up;                 // [k * size + b] -> index or -1

  std::size_t size() const { return occupation.size(); }
};

FockBasis build_basis(int n_modes, const TruncationSpec& t) {
  FockBasis basis;
  basis.n_modes = n_modes;
  const int cap = t.total_cap ? *t.total_cap : n_modes * t.n_max;

  std::vector<int> occ(static_cast<std::size_t>(n_modes), 0);
  std::vector<long long> codes;
  long long radix = 1;
  std::vector<long long> stride(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k) {
    stride[static_cast<std::size_t>(k)] = radix;
    radix *= t.n_max + 1;
  }
  // Odometer over occupations in increasing mixed-radix code.
  for (;;) {
    int total = 0;
    long long code = 0;
    for (int k = 0; k < n_modes; ++k) {
      total += occ[static_cast<std::size_t>(k)];
      code += occ[static_cast<std::size_t>(k)] * stride[static_cast<std::size_t>(k)];
    }
    if (total <= cap) {
      basis.occupation.push_back(occ);
      codes.push_back(code);
    }
    int k = 0;
    while (k < n_modes && occ[static_cast<std::size_t>(k)] == t.n_max) {
      occ[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == n_modes) break;
    ++occ[static_cast<std::size_t>(k)];
  }

  const std::size_t nb = basis.size();
  basis.up.assign(static_cast<std::size_t>(n_modes) * nb, -1);
  for (std::size_t b = 0; b < nb; ++b) {
    int total = 0;
    for (int n : basis.occupation[b]) total += n;
    for (int k = 0; k < n_modes; ++k) {
      if (basis.occupation[b][static_cast<std::size_t>(k)] == t.n_max || total == cap) {
        continue;
      }
      const long long target = codes[b] + stride[static_cast<std::size_t>(k)];
      const auto it = std::lower_bound(codes.begin(), codes.end(), target);
      if (it != codes.end() && *it == target) {
        basis.up[static_cast<std::size_t>(k) * nb + b] = it - codes.begin();
      }
    }
  }
  return basis;
}

class Hamiltonian {
 public:
  Hamiltonian(const ModelParams& p, const DiscreteBath& bath, FockBasis basis)
      : p_(p), bath_(bath), basis_(std::move(basis)) {
    const std::size_t nb = basis_.size();
    boson_energy_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      double e = 0.0;
      for (int k = 0; k < basis_.n_modes; ++k) {
        e += bath_.modes[static_cast<std::size_t>(k)].omega *
             basis_.occupation[b][static_cast<std::size_t>(k)];
      }
      boson_energy_[b] = e;
    }
    for (int q = 0; q < kQubitStates; ++q) {
      const int s1 = sz_of(q, 0);
      const int s2 = sz_of(q, 1);
      qubit_energy_[q] = -0.5 * p_.epsilon * (s1 + s2) + p_.k_ising * s1 * s2;
    }
  }

  std::size_t dim() const { return basis_.size() * kQubitStates; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t nb = basis_.size();
    const double half_delta = 0.5 * p_.delta;
    for (std::size_t b = 0; b < nb; ++b) {
      const double* xb = &x[b * kQubitStates];
      double* yb = &y[b * kQubitStates];
      for (int q = 0; q < kQubitStates; ++q) {
        yb[q] = (boson_energy_[b] + qubit_energy_[q]) * xb[q] -
                half_delta * (xb[q ^ 1] + xb[q ^ 2]);
      }
    }
    for (int k = 0; k < basis_.n_modes; ++k) {
      const double half_g = 0.5 * bath_.modes[static_cast<std::size_t>(k)].g;
      const long long* up = &basis_.up[static_cast<std::size_t>(k) * nb];
      for (std::size_t b = 0; b < nb; ++b) {
        const long long t = up[b];
        if (t < 0) continue;
        const double amp =
            half_g * std::sqrt(basis_.occupation[b][static_cast<std::size_t>(k)] + 1.0);
        const std::size_t ib = b * kQubitStates;
        const std::size_t it = static_cast<std::size_t>(t) * kQubitStates;
        // (b + b^dag)(sz_1 + sz_2): the |uu> and |dd> rows only.
        y[it] += 2.0 * amp * x[ib];
        y[ib] += 2.0 * amp * x[it];
        y[it + 3] -= 2.0 * amp * x[ib + 3];
        y[ib + 3] -= 2.0 * amp * x[it + 3];
      }
    }
  }

  std::size_t boson_count() const { return basis_.size(); }

 private:
  ModelParams p_;
  DiscreteBath bath_;
  FockBasis basis_;
  std::vector<double> boson_energy_;
  double qubit_energy_[kQubitStates] = {};
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::vector<double>& x, double a) {
  for (double& v : x) v *= a;
}

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
  int matvecs = 0;
};

Eigenpair lanczos_ground(const Hamiltonian& h, const LanczosOpts& opts) {
  const std::size_t n = h.dim();
  const double bytes_per_vec = 8.0 * static_cast<double>(n);
  const int by_memory =
      static_cast<int>(opts.memory_budget_mb * 1024.0 * 1024.0 / bytes_per_vec);
  const int m = std::max(
      2, std::min({opts.krylov_dim, by_memory, static_cast<int>(std::min<std::size_t>(n, 1 << 20))}));

  std::vector<double> x(n);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : x) v = dist(rng);
  scale(x, 1.0 / std::sqrt(dot(x, x)));

  Eigenpair out;
  std::vector<std::vector<double>> basis;
  std::vector<double> w(n);
  std::vector<double> hx(n);
  while (out.matvecs < opts.max_matvecs) {
    basis.assign(1, x);
    std::vector<double> alpha;
    std::vector<double> beta;
    for (int j = 0; j < m; ++j) {
      h.apply(basis[static_cast<std::size_t>(j)], w);
      ++out.matvecs;
      alpha.push_back(dot(basis[static_cast<std::size_t>(j)], w));
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : basis) axpy(-dot(v, w), v, w);
      }
      const double b = std::sqrt(dot(w, w));
      if (j + 1 == m || b < 1e-14 || out.matvecs >= opts.max_matvecs) {
        beta.push_back(b);
        break;
      }
      beta.push_back(b);
      scale(w, 1.0 / b);
      basis.push_back(w);
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::VectorXd diag(k);
    Eigen::VectorXd sub(std::max(k - 1, 0));
    for (int i = 0; i < k; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);

    std::fill(x.begin(), x.end(), 0.0);
    for (int i = 0; i < k; ++i) axpy(y(i), basis[static_cast<std::size_t>(i)], x);
    scale(x, 1.0 / std::sqrt(dot(x, x)));

    h.apply(x, hx);
    ++out.matvecs;
    const double theta = dot(x, hx);
    axpy(-theta, x, hx);
    out.value = theta;
    out.residual = std::sqrt(dot(hx, hx));
    if (out.residual < opts.tol) {
      out.vector = std::move(x);
      return out;
    }
  }
  throw Error(Errc::NotConverged,
              "Lanczos residual " + std::to_string(out.residual) + " after " +
                  std::to_string(out.matvecs) + " matrix-vector products");
}

}  // namespace

long long ed_dimension(int n_modes, const TruncationSpec& trunc) {
  if (n_modes < 0 || n_modes > kMaxEdModes) {
    throw Error(Errc::InvalidParameter,
                "oracle supports 0.." + std::to_string(kMaxEdModes) + " modes");
  }
  if (trunc.n_max < 0) {
    throw Error(Errc::InvalidParameter, "n_max must be non-negative");
  }
  if (trunc.total_cap && *trunc.total_cap < 0) {
    throw Error(Errc::InvalidParameter, "total_cap must be non-negative");
  }
  const long long configs = count_configs(n_modes, trunc);
  if (configs > kMaxEdDimension / kQubitStates) {
    throw Error(Errc::DimensionTooLarge,
                "truncated space exceeds " + std::to_string(kMaxEdDimension) + " states");
  }
  return configs * kQubitStates;
}

EdResult exact_ground(const ModelParams& params, const DiscreteBath& bath,
                      const TruncationSpec& trunc, const LanczosOpts& opts) {
  validate_bath(bath);
  const int n_modes = static_cast<int>(bath.modes.size());
  EdResult r;
  r.dimension = ed_dimension(n_modes, trunc);

  const Hamiltonian h(params, bath, build_basis(n_modes, trunc));
  const Eigenpair gs = lanczos_ground(h, opts);
  r.energy = gs.value;
  r.residual = gs.residual;
  r.matvecs = gs.matvecs;

  const auto& x = gs.vector;
  double sz = 0.0;
  double sx = 0.0;
  for (std::size_t b = 0; b < h.boson_count(); ++b) {
    const double* xb = &x[b * kQubitStates];
    for (int q = 0; q < kQubitStates; ++q) {
      sz += xb[q] * xb[q] * 0.5 * (sz_of(q, 0) + sz_of(q, 1));
      sx += 0.5 * xb[q] * (xb[q ^ 1] + xb[q ^ 2]);
    }
  }
  r.sz = sz;
  r.sx = sx;
  return r;
}

TruncationSweep truncation_sweep(const ModelParams& params,
                                 const DiscreteBath& bath,
                                 const std::vector<int>& n_max_list,
                                 const LanczosOpts& opts) {
  if (n_max_list.empty()) {
    throw Error(Errc::InvalidParameter, "empty n_max list");
  }
  TruncationSweep sweep;
  for (const int n : n_max_list) {
    TruncationRow row;
    row.n_max = n;
    row.energy = exact_ground(params, bath, TruncationSpec{n, std::nullopt}, opts).energy;
    if (!sweep.rows.empty()) row.change = row.energy - sweep.rows.back().energy;
    sweep.rows.push_back(row);
  }

  const auto& rows = sweep.rows;
  sweep.extrapolated = rows.back().energy;
  if (rows.size() >= 3) {
    const double d1 = rows[rows.size() - 2].change;
    const double d2 = rows.back().change;
    const double denom = d2 - d1;
    // Aitken's delta-squared only when the differences shrink geometrically.
    if (denom != 0.0 && d1 != 0.0 && std::abs(d2) < std::abs(d1) && d1 * d2 > 0.0) {
      sweep.extrapolated = rows.back().energy - d2 * d2 / denom;
    }
  }
  sweep.unconverged = rows.size() >= 2 && std::abs(rows.back().change) > 1e-8;
  return sweep;
}

}  // namespace tqsb
