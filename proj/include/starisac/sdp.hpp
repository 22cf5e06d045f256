#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "starisac/linalg.hpp"
#include "starisac/types.hpp"

namespace starisac {

// ---------------------------------------------------------------------------
// Problem carriers.
//
// Variables are complex Hermitian PSD blocks (dim 1 blocks double as
// nonnegative reals). A problem is
//   maximize   objective(X)
//   s.t.       affine constraints (=, <=, >=) on real-linear functionals,
//              LMI constraints F(X) >= 0 with F an affine Hermitian map.
// Everything is compiled to the standard equality form
//   maximize <C,X>  s.t.  <A_i,X> = b_i,  X >= 0 (block diagonal)
// by adding slack blocks, and solved natively in complex arithmetic.
// ---------------------------------------------------------------------------

struct SdpTerm {
  int block = 0;
  MatC coeff;  // Hermitian; value contribution is Re tr(coeff^H X_block)
};

// value = constant + sum_t Re tr(coeff_t^H X_{block_t})
struct SdpLinFun {
  double constant = 0.0;
  std::vector<SdpTerm> terms;

  SdpLinFun& add(int block, MatC coeff) {
    terms.push_back({block, std::move(coeff)});
    return *this;
  }
};

enum class Rel { Eq, Le, Ge };

struct SdpAffineConstraint {
  SdpLinFun fun;
  Rel rel = Rel::Eq;
  double rhs = 0.0;
};

// One entry of an affine Hermitian-valued map, at position (p,q), p <= q:
// value = c0 + re(X) + j * im(X). Unspecified entries are zero.
struct SdpLmiEntry {
  int p = 0, q = 0;
  cxd c0{0.0, 0.0};
  SdpLinFun re;
  SdpLinFun im;
};

struct SdpLmi {
  int dim = 0;
  std::vector<SdpLmiEntry> entries;
};

struct SdpProblem {
  std::vector<int> var_dims;
  SdpLinFun objective;  // maximized
  std::vector<SdpAffineConstraint> affine;
  std::vector<SdpLmi> lmis;

  void validate() const {
    auto check_fun = [&](const SdpLinFun& f, const char* who) {
      for (const auto& t : f.terms) {
        if (t.block < 0 || t.block >= static_cast<int>(var_dims.size()))
          throw std::invalid_argument(std::string(who) + ": constraint references undeclared variable");
        if (t.coeff.rows() != var_dims[t.block] || t.coeff.cols() != var_dims[t.block])
          throw std::invalid_argument(std::string(who) + ": coefficient dimension mismatch");
        if (!t.coeff.allFinite())
          throw std::invalid_argument(std::string(who) + ": non-finite coefficient");
        require_hermitian(t.coeff, 1e-9, who);
      }
      if (!std::isfinite(f.constant)) throw std::invalid_argument(std::string(who) + ": non-finite constant");
    };
    check_fun(objective, "sdp objective");
    for (const auto& con : affine) check_fun(con.fun, "sdp affine constraint");
    for (const auto& lmi : lmis)
      for (const auto& e : lmi.entries) {
        if (e.p > e.q || e.q >= lmi.dim) throw std::invalid_argument("sdp lmi: bad entry position");
        check_fun(e.re, "sdp lmi entry");
        check_fun(e.im, "sdp lmi entry");
      }
  }
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 200;
  bool real_embedding = false;  // cross-validation path
  bool admm_fallback = true;
  int admm_max_iter = 5000;
};

struct SdpSolution {
  std::vector<MatC> x;  // declared variables only
  VecR y;               // multipliers of the compiled equalities
  Status status = Status::NumericalError;
  double objective = 0.0;
  double dual_objective = 0.0;
  double rel_gap = std::numeric_limits<double>::infinity();
  double prim_inf = std::numeric_limits<double>::infinity();
  double dual_inf = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// --------------------------- standard form --------------------------------

struct SdpStandard {
  std::vector<int> dims;
  std::vector<MatC> c;                       // objective per block
  std::vector<std::vector<SdpTerm>> rows;    // equality i: sum <A_ib, X_b> = b(i)
  VecR b;
  double obj_constant = 0.0;
  int num_vars = 0;  // leading blocks that map back to declared variables
};

namespace detail_sdp {

inline double fun_norm(const std::vector<SdpTerm>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += t.coeff.squaredNorm();
  return std::sqrt(s);
}

// Hermitian matrices extracting Re/Im of entry (p,q) under <A,Y> = Re tr(A^H Y).
inline MatC re_extractor(int dim, int p, int q) {
  MatC a = MatC::Zero(dim, dim);
  if (p == q) {
    a(p, p) = 1.0;
  } else {
    a(p, q) = 0.5;
    a(q, p) = 0.5;
  }
  return a;
}

inline MatC im_extractor(int dim, int p, int q) {
  MatC a = MatC::Zero(dim, dim);
  a(p, q) = cxd(0.0, 0.5);
  a(q, p) = cxd(0.0, -0.5);
  return a;
}

}  // namespace detail_sdp

inline SdpStandard compile_sdp(const SdpProblem& prob) {
  prob.validate();
  SdpStandard std_form;
  std_form.dims = prob.var_dims;
  std_form.num_vars = static_cast<int>(prob.var_dims.size());
  std_form.obj_constant = prob.objective.constant;

  auto new_block = [&](int dim) {
    std_form.dims.push_back(dim);
    return static_cast<int>(std_form.dims.size()) - 1;
  };

  std::vector<std::vector<SdpTerm>> rows;
  std::vector<double> rhs;

  for (const auto& con : prob.affine) {
    std::vector<SdpTerm> row = con.fun.terms;
    if (con.rel == Rel::Le) {
      int s = new_block(1);
      row.push_back({s, MatC::Constant(1, 1, 1.0)});
    } else if (con.rel == Rel::Ge) {
      int s = new_block(1);
      row.push_back({s, MatC::Constant(1, 1, -1.0)});
    }
    rows.push_back(std::move(row));
    rhs.push_back(con.rhs - con.fun.constant);
  }

  for (const auto& lmi : prob.lmis) {
    int yblk = new_block(lmi.dim);
    // index specified entries
    std::vector<const SdpLmiEntry*> at(static_cast<std::size_t>(lmi.dim) * lmi.dim, nullptr);
    for (const auto& e : lmi.entries) at[e.p * lmi.dim + e.q] = &e;
    for (int p = 0; p < lmi.dim; ++p)
      for (int q = p; q < lmi.dim; ++q) {
        const SdpLmiEntry* e = at[p * lmi.dim + q];
        {  // real part: <S_pq, Y> - re(X) = Re c0
          std::vector<SdpTerm> row;
          row.push_back({yblk, detail_sdp::re_extractor(lmi.dim, p, q)});
          double c0 = 0.0, fc = 0.0;
          if (e) {
            c0 = e->c0.real();
            fc = e->re.constant;
            for (const auto& t : e->re.terms) row.push_back({t.block, -t.coeff});
          }
          rows.push_back(std::move(row));
          rhs.push_back(c0 + fc);
        }
        if (p < q) {  // imaginary part
          std::vector<SdpTerm> row;
          row.push_back({yblk, detail_sdp::im_extractor(lmi.dim, p, q)});
          double c0 = 0.0, fc = 0.0;
          if (e) {
            c0 = e->c0.imag();
            fc = e->im.constant;
            for (const auto& t : e->im.terms) row.push_back({t.block, -t.coeff});
          }
          rows.push_back(std::move(row));
          rhs.push_back(c0 + fc);
        }
      }
  }

  // objective per block
  std_form.c.resize(std_form.dims.size());
  for (std::size_t bidx = 0; bidx < std_form.dims.size(); ++bidx)
    std_form.c[bidx] = MatC::Zero(std_form.dims[bidx], std_form.dims[bidx]);
  for (const auto& t : prob.objective.terms) std_form.c[t.block] += t.coeff;

  // merge duplicate blocks within a row and normalize row scale
  std_form.b.resize(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<SdpTerm> merged;
    for (auto& t : rows[i]) {
      bool found = false;
      for (auto& mt : merged)
        if (mt.block == t.block) {
          mt.coeff += t.coeff;
          found = true;
          break;
        }
      if (!found) merged.push_back(std::move(t));
    }
    double nrm = detail_sdp::fun_norm(merged);
    double scale = nrm > 1e-12 ? 1.0 / nrm : 1.0;
    for (auto& t : merged) t.coeff *= scale;
    std_form.rows.push_back(std::move(merged));
    std_form.b(static_cast<int>(i)) = rhs[i] * scale;
  }
  return std_form;
}

// ------------------------------- solver core -------------------------------

namespace detail_sdp {

using BlockVec = std::vector<MatC>;

inline BlockVec zeros_like(const std::vector<int>& dims) {
  BlockVec v;
  v.reserve(dims.size());
  for (int d : dims) v.push_back(MatC::Zero(d, d));
  return v;
}

inline double dot(const BlockVec& a, const BlockVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += herm_inner(a[i], b[i]);
  return s;
}

inline double apply_row(const std::vector<SdpTerm>& row, const BlockVec& x) {
  double s = 0.0;
  for (const auto& t : row) s += herm_inner(t.coeff, x[t.block]);
  return s;
}

inline VecR apply_a(const SdpStandard& p, const BlockVec& x) {
  VecR r(p.b.size());
  for (int i = 0; i < p.b.size(); ++i) r(i) = apply_row(p.rows[i], x);
  return r;
}

inline BlockVec apply_at(const SdpStandard& p, const VecR& y) {
  BlockVec r = zeros_like(p.dims);
  for (int i = 0; i < p.b.size(); ++i)
    for (const auto& t : p.rows[i]) r[t.block] += y(i) * t.coeff;
  return r;
}

// Largest alpha in (0, 1] with X + alpha*D >= 0, given X > 0.
inline double max_step(const MatC& x, const MatC& d) {
  Eigen::LLT<MatC> llt(x);
  MatC l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    MatC xr = x;
    xr.diagonal().array() += 1e-14 * std::max(1.0, x.norm());
    Eigen::LLT<MatC> llt2(xr);
    if (llt2.info() != Eigen::Success) return 0.0;
    l = llt2.matrixL();
  }
  MatC m = l.triangularView<Eigen::Lower>().solve(d);
  m = l.triangularView<Eigen::Lower>().solve(m.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(m), Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-300) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

inline double block_max_step(const BlockVec& x, const BlockVec& d) {
  double a = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) a = std::min(a, max_step(x[i], d[i]));
  return a;
}

// NT scaling point per block: W = X^1/2 (X^1/2 Z X^1/2)^-1/2 X^1/2.
inline MatC nt_scaling(const MatC& x, const MatC& z) {
  MatC xh = herm_sqrt(x);
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(xh * z * xh));
  VecR lam = es.eigenvalues().cwiseMax(1e-300);
  MatC inner = es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
               es.eigenvectors().adjoint();
  return symmetrize(xh * inner * xh);
}

struct IpmWork {
  std::vector<std::vector<int>> block_rows;  // block -> constraints touching it
};

inline IpmWork build_work(const SdpStandard& p) {
  IpmWork w;
  w.block_rows.resize(p.dims.size());
  for (int i = 0; i < p.b.size(); ++i)
    for (const auto& t : p.rows[i]) w.block_rows[t.block].push_back(i);
  return w;
}

}  // namespace detail_sdp

struct SdpStandardSolution {
  detail_sdp::BlockVec x, z;
  VecR y;
  Status status = Status::NumericalError;
  double pobj = 0.0, dobj = 0.0;
  double rel_gap = std::numeric_limits<double>::infinity();
  double prim_inf = std::numeric_limits<double>::infinity();
  double dual_inf = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Infeasible-start primal-dual path following with NT scaling and a
// Mehrotra-style adaptive centering parameter.
inline SdpStandardSolution solve_sdp_ipm(const SdpStandard& prob, double tol, int max_iter) {
  using namespace detail_sdp;
  SdpStandardSolution sol;
  const int m = static_cast<int>(prob.b.size());
  const std::size_t nb = prob.dims.size();
  int ntot = 0;
  for (int d : prob.dims) ntot += d;

  // Objective scaling keeps the complementarity measure commensurate with
  // feasibility residuals; results are reported in original units.
  double cscale = 1.0;
  for (const auto& cb : prob.c)
    if (cb.size() > 0) cscale = std::max(cscale, cb.cwiseAbs().maxCoeff());
  std::vector<MatC> cmat(prob.c);
  for (auto& cb : cmat) cb /= cscale;

  double bnorm = 1.0 + prob.b.norm();
  double cnorm = 1.0;
  for (const auto& cb : cmat) cnorm = std::max(cnorm, cb.norm());

  BlockVec x = zeros_like(prob.dims), z = zeros_like(prob.dims);
  double xi = std::max(1.0, prob.b.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < nb; ++i) {
    x[i] = xi * MatC::Identity(prob.dims[i], prob.dims[i]);
    z[i] = MatC::Identity(prob.dims[i], prob.dims[i]);
  }
  VecR y = VecR::Zero(m);

  IpmWork work = build_work(prob);
  double best_score = std::numeric_limits<double>::infinity();
  SdpStandardSolution best;
  int stall_count = 0;
  double last_pinf = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    sol.iterations = iter + 1;
    double mu = dot(x, z) / ntot;
    VecR rp = prob.b - apply_a(prob, x);
    BlockVec aty = apply_at(prob, y);
    BlockVec rd(nb);  // A*(y) - C - Z, should go to 0
    double rdnorm = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      rd[i] = aty[i] - cmat[i] - z[i];
      rdnorm = std::max(rdnorm, rd[i].norm());
    }
    double pobj = 0.0;
    for (std::size_t i = 0; i < nb; ++i) pobj += herm_inner(cmat[i], x[i]);
    double dobj = prob.b.dot(y);
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double pinf = rp.norm() / bnorm;
    double dinf = rdnorm / cnorm;
    double score = std::max({gap, pinf, dinf});

    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.z = z;
      best.y = y;
      best.pobj = pobj * cscale;
      best.dobj = dobj * cscale;
      best.rel_gap = gap;
      best.prim_inf = pinf;
      best.dual_inf = dinf;
    }
#ifdef STARISAC_SDP_TRACE
    std::printf("  it=%3d mu=%9.2e gap=%9.2e pinf=%9.2e dinf=%9.2e\n", iter, mu, gap, pinf, dinf);
#endif
    if (gap <= tol && pinf <= tol && dinf <= tol) {
      sol = best;
      sol.iterations = iter + 1;
      sol.status = Status::Optimal;
      return sol;
    }

    // Crude infeasibility detection: the primal residual refuses to shrink
    // while complementarity keeps collapsing, or the dual ray blows up.
    if (pinf > 1e3 * tol && pinf > 0.9 * last_pinf)
      ++stall_count;
    else
      stall_count = 0;
    last_pinf = pinf;
    if ((stall_count > 25 && mu < 1e-9) || y.cwiseAbs().maxCoeff() > 1e12) {
      sol = best;
      sol.iterations = iter + 1;
      sol.status = Status::Infeasible;
      return sol;
    }

    // NT scaling and Schur complement.
    std::vector<MatC> w(nb);
    for (std::size_t i = 0; i < nb; ++i) w[i] = nt_scaling(x[i], z[i]);

    // K_i = W A_i W restricted to touched blocks.
    std::vector<std::vector<MatC>> k(m);
    for (int i = 0; i < m; ++i) {
      k[i].reserve(prob.rows[i].size());
      for (const auto& t : prob.rows[i]) k[i].push_back(w[t.block] * t.coeff * w[t.block]);
    }
    MatR schur = MatR::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (std::size_t ti = 0; ti < prob.rows[i].size(); ++ti) {
        int blk = prob.rows[i][ti].block;
        for (int j : work.block_rows[blk]) {
          if (j < i) continue;
          for (const auto& tj : prob.rows[j])
            if (tj.block == blk) schur(i, j) += herm_inner(k[i][ti], tj.coeff);
        }
      }
    }
    schur = schur.selfadjointView<Eigen::Upper>();
    Eigen::LLT<MatR> llt(schur);
    Eigen::LDLT<MatR> ldlt;
    bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) {
      MatR reg = schur;
      reg.diagonal().array() += 1e-12 * std::max(1.0, schur.diagonal().maxCoeff());
      ldlt.compute(reg);
      if (ldlt.info() != Eigen::Success) break;
    }
    auto schur_solve = [&](const VecR& rhs) {
      VecR s0 = use_llt ? VecR(llt.solve(rhs)) : VecR(ldlt.solve(rhs));
      VecR resid = rhs - schur * s0;  // one refinement pass
      s0 += use_llt ? VecR(llt.solve(resid)) : VecR(ldlt.solve(resid));
      return s0;
    };

    // Shared pieces: Zinv and W rd W.
    std::vector<MatC> zinv(nb), wrdw(nb);
    bool zfail = false;
    for (std::size_t i = 0; i < nb; ++i) {
      Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(z[i]));
      if (es.eigenvalues().minCoeff() <= 0.0) { zfail = true; break; }
      zinv[i] = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                es.eigenvectors().adjoint();
      wrdw[i] = w[i] * rd[i] * w[i];
    }
    if (zfail) break;

    auto solve_direction = [&](double sigma_mu, VecR& dy, BlockVec& dx, BlockVec& dz) {
      BlockVec target(nb);
      for (std::size_t i = 0; i < nb; ++i)
        target[i] = sigma_mu * zinv[i] - wrdw[i];
      VecR rhs = apply_a(prob, target) - prob.b;
      dy = schur_solve(rhs);
      BlockVec atdy = apply_at(prob, dy);
      dx.resize(nb);
      dz.resize(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        dz[i] = symmetrize(atdy[i] + rd[i]);
        dx[i] = symmetrize(sigma_mu * zinv[i] - x[i] - w[i] * dz[i] * w[i]);
      }
    };

    // Predictor picks sigma, then one combined corrector step. Small
    // predictor steps trigger extra centering so iterates stay off the
    // cone boundary.
    VecR dy;
    BlockVec dx, dz;
    solve_direction(0.0, dy, dx, dz);
    double ap = block_max_step(x, dx);
    double ad = block_max_step(z, dz);
    double mu_aff = 0.0;
    {
      BlockVec xa(nb), za(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        xa[i] = x[i] + 0.98 * ap * dx[i];
        za[i] = z[i] + 0.98 * ad * dz[i];
      }
      mu_aff = dot(xa, za) / ntot;
    }
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0), 1e-8, 0.999);
    if (std::min(ap, ad) < 0.2) sigma = std::max(sigma, 0.5);
    solve_direction(sigma * mu, dy, dx, dz);
    double gamma = 0.9 + 0.09 * std::min({ap, ad, 1.0});
    ap = std::min(1.0, gamma * block_max_step(x, dx));
    ad = std::min(1.0, gamma * block_max_step(z, dz));
    if (ap < 1e-10 && ad < 1e-10) break;  // no progress possible
    for (std::size_t i = 0; i < nb; ++i) {
      x[i] = symmetrize(x[i] + ap * dx[i]);
      z[i] = symmetrize(z[i] + ad * dz[i]);
    }
    y += ad * dy;
  }

  sol = best;
  sol.status = best_score <= 100.0 * tol ? Status::MaxIter : Status::NumericalError;
  return sol;
}

// Boundary-point ADMM (dual augmented Lagrangian with PSD projection);
// slower but immune to Schur ill-conditioning.
inline SdpStandardSolution solve_sdp_admm(const SdpStandard& prob, double tol, int max_iter) {
  using namespace detail_sdp;
  SdpStandardSolution sol;
  const int m = static_cast<int>(prob.b.size());
  const std::size_t nb = prob.dims.size();

  double cscale = 1.0;
  for (const auto& cb : prob.c)
    if (cb.size() > 0) cscale = std::max(cscale, cb.cwiseAbs().maxCoeff());
  std::vector<MatC> cmat(prob.c);
  for (auto& cb : cmat) cb /= cscale;

  MatR gram = MatR::Zero(m, m);
  IpmWork work = build_work(prob);
  for (int i = 0; i < m; ++i)
    for (const auto& ti : prob.rows[i])
      for (int j : work.block_rows[ti.block]) {
        if (j < i) continue;
        for (const auto& tj : prob.rows[j])
          if (tj.block == ti.block) gram(i, j) += herm_inner(ti.coeff, tj.coeff);
      }
  gram = gram.selfadjointView<Eigen::Upper>();
  gram.diagonal().array() += 1e-12;
  Eigen::LDLT<MatR> ldlt(gram);

  BlockVec x = zeros_like(prob.dims), z = zeros_like(prob.dims);
  VecR y = VecR::Zero(m);
  double sigma = 1.0;
  double bnorm = 1.0 + prob.b.norm();
  double cnorm = 1.0;
  for (const auto& cb : cmat) cnorm = std::max(cnorm, cb.norm());

  for (int iter = 0; iter < max_iter; ++iter) {
    sol.iterations = iter + 1;
    // y-step: (AA') y = A(C + Z) + (A(X) - b)/sigma
    BlockVec cz(nb);
    for (std::size_t i = 0; i < nb; ++i) cz[i] = cmat[i] + z[i];
    VecR rhs = apply_a(prob, cz) + (apply_a(prob, x) - prob.b) / sigma;
    y = ldlt.solve(rhs);
    // Z and X from the PSD split of M = A*(y) - C - X/sigma.
    BlockVec aty = apply_at(prob, y);
    double dinf = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      MatC mmat = aty[i] - cmat[i] - x[i] / sigma;
      Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(mmat));
      VecR lp = es.eigenvalues().cwiseMax(0.0);
      VecR ln = (-es.eigenvalues()).cwiseMax(0.0);
      z[i] = es.eigenvectors() * lp.asDiagonal() * es.eigenvectors().adjoint();
      x[i] = sigma * es.eigenvectors() * ln.asDiagonal() * es.eigenvectors().adjoint();
      dinf = std::max(dinf, (aty[i] - cmat[i] - z[i]).norm());
    }
    double pinf = (apply_a(prob, x) - prob.b).norm() / bnorm;
    dinf /= cnorm;
    double pobj = 0.0;
    for (std::size_t i = 0; i < nb; ++i) pobj += herm_inner(cmat[i], x[i]);
    double dobj = prob.b.dot(y);
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (pinf <= tol && dinf <= tol && gap <= 10.0 * tol) {
      sol.status = Status::Optimal;
      sol.x = x;
      sol.z = z;
      sol.y = y;
      sol.pobj = pobj * cscale;
      sol.dobj = dobj * cscale;
      sol.rel_gap = gap;
      sol.prim_inf = pinf;
      sol.dual_inf = dinf;
      return sol;
    }
    // penalty balancing
    if (iter % 10 == 9) {
      if (pinf > 10.0 * dinf) sigma *= 0.7;
      else if (dinf > 10.0 * pinf) sigma *= 1.3;
    }
  }
  sol.status = Status::MaxIter;
  sol.x = x;
  sol.z = z;
  sol.y = y;
  return sol;
}

// Real-embedding of the standard form: every complex Hermitian block H
// becomes [[Re H, -Im H], [Im H, Re H]] with coefficients halved, which
// preserves objective values and feasibility.
inline SdpStandard embed_real(const SdpStandard& prob) {
  auto embed = [](const MatC& h) {
    const int n = static_cast<int>(h.rows());
    MatC e = MatC::Zero(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real().cast<cxd>();
    e.topRightCorner(n, n) = (-h.imag()).cast<cxd>();
    e.bottomLeftCorner(n, n) = h.imag().cast<cxd>();
    e.bottomRightCorner(n, n) = h.real().cast<cxd>();
    return e;
  };
  SdpStandard r;
  r.num_vars = prob.num_vars;
  r.obj_constant = prob.obj_constant;
  r.b = prob.b;
  for (int d : prob.dims) r.dims.push_back(2 * d);
  for (const auto& cb : prob.c) r.c.push_back(0.5 * embed(cb));
  for (const auto& row : prob.rows) {
    std::vector<SdpTerm> rr;
    for (const auto& t : row) rr.push_back({t.block, 0.5 * embed(t.coeff)});
    r.rows.push_back(std::move(rr));
  }
  return r;
}

inline SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts = SdpOptions()) {
  SdpStandard std_form = compile_sdp(prob);

  SdpStandardSolution core;
  if (opts.real_embedding) {
    SdpStandard emb = embed_real(std_form);
    core = solve_sdp_ipm(emb, opts.tol, opts.max_iter);
    // Recover complex blocks from the embedded solution.
    detail_sdp::BlockVec xc;
    for (std::size_t i = 0; i < std_form.dims.size(); ++i) {
      int n = std_form.dims[i];
      MatC top_l = core.x[i].topLeftCorner(n, n);
      MatC bot_r = core.x[i].bottomRightCorner(n, n);
      MatC bot_l = core.x[i].bottomLeftCorner(n, n);
      MatC top_r = core.x[i].topRightCorner(n, n);
      MatC rec = 0.5 * (top_l + bot_r) + 0.5 * kJ * (bot_l - top_r);
      xc.push_back(symmetrize((rec + rec.adjoint()) * 0.5));
    }
    core.x = std::move(xc);
  } else {
    core = solve_sdp_ipm(std_form, opts.tol, opts.max_iter);
    if (core.status == Status::NumericalError && opts.admm_fallback)
      core = solve_sdp_admm(std_form, std::max(opts.tol, 1e-8), opts.admm_max_iter);
  }

  SdpSolution out;
  out.status = core.status;
  out.x.assign(core.x.begin(), core.x.begin() + std_form.num_vars);
  for (auto& xb : out.x) xb = symmetrize(xb);
  out.y = core.y;
  out.objective = core.pobj + std_form.obj_constant;
  out.dual_objective = core.dobj + std_form.obj_constant;
  out.rel_gap = core.rel_gap;
  out.prim_inf = core.prim_inf;
  out.dual_inf = core.dual_inf;
  out.iterations = core.iterations;
  return out;
}

inline SdpSolution solve_sdp(const SdpProblem& prob, double tol) {
  SdpOptions opts;
  opts.tol = tol;
  return solve_sdp(prob, opts);
}

}  // namespace starisac
