#include "folia/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace folia {

std::vector<double> simplex_vertex(int i, int k) {
  if (i < 0 || i > k) throw ConfigError("vertex index out of range");
  std::vector<double> v(k, 0.0);
  for (int j = 0; j < i; ++j) v[j] = 1.0;
  return v;
}

std::vector<double> coface(int i, std::span<const double> t) {
  const int k = static_cast<int>(t.size());
  if (i < 0 || i > k + 1) throw ConfigError("coface index out of range");
  std::vector<double> out;
  out.reserve(k + 1);
  if (i == 0) out.push_back(1.0);
  for (int j = 0; j < k; ++j) {
    out.push_back(t[j]);
    if (j + 1 == i) out.push_back(t[j]);
  }
  if (i == k + 1) out.push_back(0.0);
  return out;
}

std::vector<double> codegeneracy(int i, std::span<const double> t) {
  const int k = static_cast<int>(t.size());
  if (i < 1 || i > k) throw ConfigError("codegeneracy index out of range");
  std::vector<double> out(t.begin(), t.end());
  out.erase(out.begin() + (i - 1));
  return out;
}

std::vector<double> retraction(std::span<const double> x) {
  std::vector<double> t(x.begin(), x.end());
  for (int i = static_cast<int>(t.size()) - 2; i >= 0; --i) t[i] = std::max(t[i], t[i + 1]);
  return t;
}

std::vector<Expr> coface_exprs(int i, int k) {
  if (i < 0 || i > k + 1) throw ConfigError("coface index out of range");
  std::vector<Expr> out;
  if (i == 0) out.emplace_back(1.0);
  for (int j = 0; j < k; ++j) {
    out.push_back(Expr::var(j));
    if (j + 1 == i) out.push_back(Expr::var(j));
  }
  if (i == k + 1) out.emplace_back(0.0);
  return out;
}

std::vector<Expr> codegeneracy_exprs(int i, int k) {
  if (i < 1 || i > k + 1) throw ConfigError("codegeneracy index out of range");
  std::vector<Expr> out;
  for (int j = 0; j <= k; ++j)
    if (j != i - 1) out.push_back(Expr::var(j));
  return out;
}

std::vector<Expr> front_exprs(int i, int k) {
  if (i < 0 || i > k) throw ConfigError("front face index out of range");
  std::vector<Expr> out;
  for (int j = 0; j < k; ++j) out.push_back(j < i ? Expr::var(j) : Expr());
  return out;
}

std::vector<Expr> back_exprs(int j, int k) {
  if (j < 0 || j > k) throw ConfigError("back face index out of range");
  std::vector<Expr> out;
  for (int m = 0; m < k - j; ++m) out.emplace_back(1.0);
  for (int m = 0; m < j; ++m) out.push_back(Expr::var(m));
  return out;
}

// ---------------------------------------------------------------------------

SimplexMap::SimplexMap(const Chart& chart, int k, std::vector<Expr> comps)
    : chart_(chart), k_(k), comps_(std::move(comps)) {
  if (k < 0) throw ConfigError("simplex dimension must be nonnegative");
  if (static_cast<int>(comps_.size()) != chart.n)
    throw ConfigError("simplex map needs " + std::to_string(chart.n) + " components");
  for (const Expr& e : comps_)
    if (e.max_var() >= k) throw ConfigError("simplex map uses a variable beyond t" + std::to_string(k));
  std::vector<Expr> outs = comps_;
  for (int i = 0; i < chart.n; ++i)
    for (int j = 0; j < k; ++j) outs.push_back(comps_[i].diff(j));
  jet_ = std::make_shared<const Program>(outs);
}

SimplexMap SimplexMap::constant(const Chart& chart, std::span<const double> point) {
  std::vector<Expr> c;
  for (double v : point) c.emplace_back(v);
  return SimplexMap(chart, 0, c);
}

SimplexMap SimplexMap::affine(const Chart& chart, const std::vector<std::vector<double>>& verts) {
  // v_0 + sum_j t_j (v_j - v_{j-1}) hits vertex i at (1^i, 0^{k-i})
  const int k = static_cast<int>(verts.size()) - 1;
  std::vector<Expr> comps(chart.n);
  for (int i = 0; i < chart.n; ++i) {
    Expr e(verts[0][i]);
    for (int j = 1; j <= k; ++j) {
      const double dv = verts[j][i] - verts[j - 1][i];
      if (dv != 0.0) e = e + Expr(dv) * Expr::var(j - 1);
    }
    comps[i] = e;
  }
  return SimplexMap(chart, k, comps);
}

bool SimplexMap::leafwise() const {
  for (int i = chart_.leaf_dim(); i < chart_.n; ++i)
    if (!comps_[i].is_constant_expr()) return false;
  return true;
}

SimplexMap SimplexMap::compose(std::span<const Expr> inner, int m) const {
  if (static_cast<int>(inner.size()) != k_) throw ConfigError("inner map has the wrong dimension");
  std::vector<Expr> c;
  c.reserve(comps_.size());
  for (const Expr& e : comps_) c.push_back(e.substitute(inner));
  return SimplexMap(chart_, m, c);
}

std::vector<double> SimplexMap::eval(std::span<const double> t) const {
  std::vector<double> x(chart_.n), jac(static_cast<std::size_t>(chart_.n) * k_);
  eval_jet(t, x, jac);
  return x;
}

void SimplexMap::eval_jet(std::span<const double> t, std::span<double> x, std::span<double> jac) const {
  thread_local std::vector<double> buf;
  buf.resize(jet_->num_outputs());
  jet_->eval(t, buf);
  std::copy(buf.begin(), buf.begin() + chart_.n, x.begin());
  std::copy(buf.begin() + chart_.n, buf.end(), jac.begin());
}

std::string SimplexMap::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (i) os << ", ";
    os << comps_[i].to_string([](int v) { return "t" + std::to_string(v + 1); });
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

PiecewisePath::PiecewisePath(int dim, std::vector<Piece> pieces) : dim_(dim), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ConfigError("a path needs at least one piece");
  for (const Piece& p : pieces_) {
    if (static_cast<int>(p.comps.size()) != dim_) throw ConfigError("path piece has the wrong dimension");
    std::vector<Expr> outs = p.comps;
    for (const Expr& e : p.comps) outs.push_back(e.diff(0));
    jets_.push_back(std::make_shared<const Program>(outs));
  }
}

std::vector<double> PiecewisePath::breakpoints() const {
  std::vector<double> b{pieces_.front().u0};
  for (const Piece& p : pieces_) b.push_back(p.u1);
  return b;
}

std::size_t PiecewisePath::piece_index(double u) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (u < pieces_[i].u1) return i;
  return pieces_.size() - 1;
}

std::vector<double> PiecewisePath::eval(double u) const {
  std::vector<double> x(dim_), dx(dim_);
  eval_jet(u, x, dx);
  return x;
}

void PiecewisePath::eval_jet(double u, std::span<double> x, std::span<double> dx) const {
  std::size_t i = piece_index(u);
  thread_local std::vector<double> buf;
  buf.resize(2 * dim_);
  double uu[1] = {u};
  jets_[i]->eval(uu, buf);
  std::copy(buf.begin(), buf.begin() + dim_, x.begin());
  std::copy(buf.begin() + dim_, buf.end(), dx.begin());
}

PiecewisePath PiecewisePath::map(std::span<const Expr> f, int out_dim) const {
  std::vector<Piece> out;
  for (const Piece& p : pieces_) {
    Piece q{p.u0, p.u1, {}};
    for (const Expr& e : f) q.comps.push_back(e.substitute(p.comps));
    out.push_back(std::move(q));
  }
  return PiecewisePath(out_dim, out);
}

PiecewisePath PiecewisePath::rescaled(double a, double b) const {
  // new time s in [a,b] corresponds to old time (s - a)/(b - a)
  const double len = b - a;
  std::vector<Expr> sub{(Expr::var(0) - Expr(a)) * Expr(1.0 / len)};
  std::vector<Piece> out;
  for (const Piece& p : pieces_) {
    Piece q{a + len * p.u0, a + len * p.u1, {}};
    for (const Expr& e : p.comps) q.comps.push_back(e.substitute(sub));
    out.push_back(std::move(q));
  }
  out.back().u1 = b;
  return PiecewisePath(dim_, out);
}

PiecewisePath PiecewisePath::restricted(double a, double b) const {
  const double len = b - a;
  std::vector<Piece> out;
  if (len <= 0.0) {
    std::vector<Expr> c;
    for (double v : eval(a)) c.emplace_back(v);
    out.push_back(Piece{0.0, 1.0, c});
    return PiecewisePath(dim_, out);
  }
  std::vector<Expr> sub{Expr(a) + Expr(len) * Expr::var(0)};
  for (const Piece& p : pieces_) {
    double lo = std::max(p.u0, a), hi = std::min(p.u1, b);
    if (hi - lo <= 1e-15 * len) continue;
    Piece q{(lo - a) / len, (hi - a) / len, {}};
    for (const Expr& e : p.comps) q.comps.push_back(e.substitute(sub));
    out.push_back(std::move(q));
  }
  out.front().u0 = 0.0;
  out.back().u1 = 1.0;
  return PiecewisePath(dim_, out);
}

PiecewisePath PiecewisePath::join(
    int dim, const std::vector<std::pair<PiecewisePath, std::pair<double, double>>>& parts) {
  std::vector<Piece> out;
  for (const auto& [path, iv] : parts) {
    if (iv.second - iv.first <= 0.0) continue;
    PiecewisePath r = path.rescaled(iv.first, iv.second);
    for (const Piece& p : r.pieces()) out.push_back(p);
  }
  return PiecewisePath(dim, out);
}

PiecewisePath concatenate(const PiecewisePath& first, const PiecewisePath& second, double split) {
  return PiecewisePath::join(first.dim(), {{first, {0.0, split}}, {second, {split, 1.0}}});
}

PiecewisePath lambda_path(std::span<const double> w_in) {
  const int k = static_cast<int>(w_in.size()) + 1;
  std::vector<double> w(w_in.begin(), w_in.end());
  w.push_back(1.0);
  std::vector<PiecewisePath::Piece> pieces;
  const Expr u = Expr::var(0);
  for (int m = 1; m <= k; ++m) {
    const int a = k - m + 1;
    Expr tau = Expr(static_cast<double>(m)) - Expr(static_cast<double>(k)) * u;
    std::vector<Expr> c(k);
    for (int b = 1; b <= k; ++b) {
      if (b < a)
        c[b - 1] = Expr(w[b - 1]);
      else if (b == a)
        c[b - 1] = tau * Expr(w[a - 1]);
    }
    pieces.push_back({(m - 1.0) / k, static_cast<double>(m) / k, c});
  }
  return PiecewisePath(k, pieces);
}

PiecewisePath theta_path(std::span<const double> w_in) {
  const int k = static_cast<int>(w_in.size()) + 1;
  PiecewisePath lam = lambda_path(w_in);
  std::vector<double> w(w_in.begin(), w_in.end());
  w.push_back(1.0);
  std::vector<PiecewisePath::Piece> pieces;
  for (int m = 1; m <= k; ++m) {
    const int a = k - m + 1;
    const double lo = (m - 1.0) / k, hi = static_cast<double>(m) / k;
    std::vector<double> cuts{lo, hi};
    for (int j = 1; j < a; ++j)
      if (w[j - 1] < w[a - 1]) cuts.push_back(lo + (1.0 - w[j - 1] / w[a - 1]) / k);
    std::sort(cuts.begin(), cuts.end());
    const auto& lp = lam.pieces()[m - 1];
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      if (cuts[c + 1] - cuts[c] <= 1e-15) continue;
      double mid = 0.5 * (cuts[c] + cuts[c + 1]);
      std::vector<double> x = lam.eval(mid);
      std::vector<Expr> comps(k);
      for (int i = 0; i < k; ++i) {
        int arg = i;
        for (int j = i + 1; j < k; ++j)
          if (x[j] > x[arg]) arg = j;
        comps[i] = lp.comps[arg];
      }
      pieces.push_back({cuts[c], cuts[c + 1], comps});
    }
  }
  return PiecewisePath(k, pieces);
}

PiecewisePath concat_mu(int i, const PiecewisePath& alpha, const PiecewisePath& beta) {
  const int k = alpha.dim() + beta.dim();
  if (i != alpha.dim()) throw ConfigError("concat_mu: alpha must be a path in Delta^i");
  if (k == 0) throw ConfigError("concat_mu of two constant paths");
  PiecewisePath first = beta.map(back_exprs(k - i, k), k);
  PiecewisePath second = alpha.map(front_exprs(i, k), k);
  if (i > 0 && i < k) {
    auto e = first.eval(1.0), s = second.eval(0.0);
    for (int d = 0; d < k; ++d)
      if (std::abs(e[d] - s[d]) > 1e-9) throw ConfigError("concat_mu: endpoints do not match");
  }
  const double split = static_cast<double>(k - i) / k;
  return PiecewisePath::join(k, {{first, {0.0, split}}, {second, {split, 1.0}}});
}

PiecewisePath omega_reparam(int j, int k, const PiecewisePath& gamma) {
  if (k < 2 || j < 1 || j > k) throw ConfigError("omega_reparam index out of range");
  const double c = (j - 1.0) / (k - 1.0);
  PiecewisePath head = gamma.restricted(0.0, c);
  PiecewisePath tail = gamma.restricted(c, 1.0);
  PiecewisePath plateau = gamma.restricted(c, c);
  return PiecewisePath::join(gamma.dim(), {{head, {0.0, (j - 1.0) / k}},
                                           {plateau, {(j - 1.0) / k, static_cast<double>(j) / k}},
                                           {tail, {static_cast<double>(j) / k, 1.0}}});
}

}  // namespace folia
