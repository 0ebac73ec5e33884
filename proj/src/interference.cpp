#include "homsim/interference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "homsim/errors.hpp"

namespace homsim {

namespace {

using cplx = std::complex<double>;

double clamp_probability(double p) {
  if (p < 0.0) {
    if (p < -1e-12) throw std::logic_error("probability fell below zero");
    return 0.0;
  }
  return p;
}

struct ProjectedPair {
  std::vector<cplx> c, d;  // Schmidt coefficients of the two photons
  double r1 = 0.0, r2 = 0.0;
};

ProjectedPair project_pair(const TwoPhotonInput& input, std::size_t mode_cutoff,
                           const StatisticsOptions& opts) {
  const SchmidtDecomposition& dec = input.decomposition;
  if (mode_cutoff < 1) throw invalid_parameter("mode cutoff must be at least 1");
  if (mode_cutoff > dec.retained())
    throw invalid_parameter("mode cutoff exceeds retained mode count");
  ModeAmplitudes m1 = project(input.envelope_1, dec, mode_cutoff);
  ModeAmplitudes m2 = project(input.envelope_2, dec, mode_cutoff);
  const double dropped = m1.residual_norm * m1.residual_norm +
                         m2.residual_norm * m2.residual_norm;
  // Weight beyond the cutoff is treated as loss; above the bound that is no
  // longer a small correction but silently discarded probability.
  if (dropped > opts.truncation_bound)
    throw insufficient_modes("combined truncation weight " + std::to_string(dropped) +
                             " exceeds bound " + std::to_string(opts.truncation_bound) +
                             "; raise mode_cutoff");
  return ProjectedPair{std::move(m1.coefficients), std::move(m2.coefficients),
                       m1.residual_norm, m2.residual_norm};
}

}  // namespace

TwoPhotonInput::TwoPhotonInput(SchmidtDecomposition dec, TemporalEnvelope env1,
                               TemporalEnvelope env2)
    : decomposition(std::move(dec)),
      envelope_1(std::move(env1)),
      envelope_2(std::move(env2)) {
  if (!(envelope_1.grid() == decomposition.grid()) ||
      !(envelope_2.grid() == decomposition.grid()))
    throw invalid_parameter("input envelopes must live on the decomposition's grid");
}

OutputStatistics analytic_statistics(const TwoPhotonInput& input, std::size_t mode_cutoff,
                                     const StatisticsOptions& opts) {
  const ProjectedPair pr = project_pair(input, mode_cutoff, opts);
  const SchmidtDecomposition& dec = input.decomposition;

  // Per-photon, per-output-port survival weight and the lambda-weighted
  // envelope overlap. Everything observable reduces to these three numbers
  // plus the loss weights.
  double a = 0.0, b = 0.0;
  cplx s = 0.0;
  for (std::size_t i = 0; i < mode_cutoff; ++i) {
    const double lam = dec.lambda(i);
    a += 0.5 * lam * std::norm(pr.c[i]);
    b += 0.5 * lam * std::norm(pr.d[i]);
    s += lam * std::conj(pr.c[i]) * pr.d[i];
  }
  const double loss1 = clamp_probability(1.0 - 2.0 * a);
  const double loss2 = clamp_probability(1.0 - 2.0 * b);
  const double s2 = std::norm(s);

  OutputStatistics out;
  out.p20 = clamp_probability(a * b + 0.25 * s2);
  out.p02 = out.p20;
  out.p11 = clamp_probability(2.0 * a * b - 0.5 * s2);
  out.p10 = clamp_probability(a * loss2 + b * loss1);
  out.p01 = out.p10;
  out.p00 = clamp_probability(loss1 * loss2);

  // The +/- two-photon amplitudes are anti-proportional pattern by pattern,
  // so the retained |2,0><0,2| coherence is exactly -P(2,0).
  const double q = -(a * b + 0.25 * s2);
  out.rho2 = {cplx(out.p20), 0.0, cplx(q), 0.0, cplx(out.p11), 0.0, cplx(q), 0.0,
              cplx(out.p02)};
  out.truncation_1 = pr.r1;
  out.truncation_2 = pr.r2;
  out.modes_used = mode_cutoff;
  return out;
}

OutputStatistics fock_oracle(const TwoPhotonInput& input, std::size_t mode_cutoff,
                             const StatisticsOptions& opts) {
  if (mode_cutoff > 6)
    throw invalid_parameter("fock_oracle: mode cutoff limited to 6");
  const ProjectedPair pr = project_pair(input, mode_cutoff, opts);
  const SchmidtDecomposition& dec = input.decomposition;

  // One extra lambda = 0 temporal slot carries the envelope weight outside
  // the cutoff; it is transformed like any other mode and lands in loss.
  const std::size_t ne = mode_cutoff + 1;
  const std::size_t m_total = 4 * ne;
  // Mode layout, inputs: [ch1 | ch2 | vac+ | vac-], outputs: [+ | - | l1 | l2].
  const auto ch1 = [ne](std::size_t i) { return i; };
  const auto ch2 = [ne](std::size_t i) { return ne + i; };
  const auto vplus = [ne](std::size_t i) { return 2 * ne + i; };
  const auto vminus = [ne](std::size_t i) { return 3 * ne + i; };
  const auto& out_plus = ch1;
  const auto& out_minus = ch2;
  const auto& out_l1 = vplus;
  const auto& out_l2 = vminus;

  // Single-particle transfer matrix, rows = outputs, columns = inputs. The
  // loss rows complete each per-mode 4x4 block to a unitary.
  Matrix t(m_total, m_total, 0.0);
  for (std::size_t i = 0; i < ne; ++i) {
    const double lam = (i < mode_cutoff) ? dec.lambda(i) : 0.0;
    const double sl = std::sqrt(0.5 * lam);
    const double sv = std::sqrt(std::max(0.0, 1.0 - lam));
    const double cl = std::sqrt(0.5 * std::max(0.0, 1.0 - lam));
    const double sq = std::sqrt(lam);
    t(out_plus(i), ch1(i)) = sl;
    t(out_plus(i), ch2(i)) = sl;
    t(out_plus(i), vplus(i)) = sv;
    t(out_minus(i), ch1(i)) = sl;
    t(out_minus(i), ch2(i)) = -sl;
    t(out_minus(i), vminus(i)) = sv;
    t(out_l1(i), ch1(i)) = cl;
    t(out_l1(i), ch2(i)) = cl;
    t(out_l1(i), vplus(i)) = -sq;
    t(out_l2(i), ch1(i)) = cl;
    t(out_l2(i), ch2(i)) = -cl;
    t(out_l2(i), vminus(i)) = -sq;
  }

  // Two-photon state as a symmetric coefficient matrix: |Psi> =
  // sum_{nn'} C_{nn'} a+_n a+_n' |0>, C = (A B^T + B A^T)/2.
  std::vector<cplx> amp1(m_total, 0.0), amp2(m_total, 0.0);
  for (std::size_t i = 0; i < mode_cutoff; ++i) {
    amp1[ch1(i)] = pr.c[i];
    amp2[ch2(i)] = pr.d[i];
  }
  amp1[ch1(ne - 1)] = pr.r1;
  amp2[ch2(ne - 1)] = pr.r2;

  std::vector<cplx> c_in(m_total * m_total, 0.0);
  for (std::size_t n = 0; n < m_total; ++n)
    for (std::size_t np = 0; np < m_total; ++np)
      c_in[n * m_total + np] = 0.5 * (amp1[n] * amp2[np] + amp2[n] * amp1[np]);

  // C_out = T C_in T^T, done as two explicit dense products.
  std::vector<cplx> tmp(m_total * m_total, 0.0), c_out(m_total * m_total, 0.0);
  for (std::size_t m = 0; m < m_total; ++m)
    for (std::size_t n = 0; n < m_total; ++n) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < m_total; ++k) acc += t(m, k) * c_in[k * m_total + n];
      tmp[m * m_total + n] = acc;
    }
  for (std::size_t m = 0; m < m_total; ++m)
    for (std::size_t n = 0; n < m_total; ++n) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < m_total; ++k) acc += tmp[m * m_total + k] * t(n, k);
      c_out[m * m_total + n] = acc;
    }

  // Occupation amplitude of the unordered pair {m, m'}.
  const double sqrt2 = std::sqrt(2.0);
  const auto pair_amp = [&](std::size_t m, std::size_t mp) {
    return (m == mp) ? sqrt2 * c_out[m * m_total + m] : 2.0 * c_out[m * m_total + mp];
  };
  // Output class: photons in + count toward n_plus, in - toward n_minus,
  // l1/l2 are traced out.
  const auto klass = [&](std::size_t m) {
    if (m < ne) return 0;       // +
    if (m < 2 * ne) return 1;   // -
    return 2;                   // loss
  };

  double p[3][3] = {{0.0}};
  for (std::size_t m = 0; m < m_total; ++m)
    for (std::size_t mp = m; mp < m_total; ++mp) {
      const double w = std::norm(pair_amp(m, mp));
      int nplus = (klass(m) == 0) + (klass(mp) == 0);
      int nminus = (klass(m) == 1) + (klass(mp) == 1);
      p[nplus][nminus] += w;
    }

  OutputStatistics out;
  out.p00 = p[0][0];
  out.p10 = p[1][0];
  out.p01 = p[0][1];
  out.p20 = p[2][0];
  out.p11 = p[1][1];
  out.p02 = p[0][2];

  // |2,0><0,2| coherence: sum over matched temporal patterns {i, j}.
  cplx q = 0.0;
  for (std::size_t i = 0; i < ne; ++i)
    for (std::size_t j = i; j < ne; ++j)
      q += pair_amp(out_plus(i), out_plus(j)) *
           std::conj(pair_amp(out_minus(i), out_minus(j)));
  out.rho2 = {cplx(out.p20), 0.0, q, 0.0, cplx(out.p11), 0.0, std::conj(q), 0.0,
              cplx(out.p02)};
  out.truncation_1 = pr.r1;
  out.truncation_2 = pr.r2;
  out.modes_used = mode_cutoff;
  return out;
}

double max_deviation(const OutputStatistics& a, const OutputStatistics& b) {
  double dev = 0.0;
  dev = std::max(dev, std::abs(a.p00 - b.p00));
  dev = std::max(dev, std::abs(a.p10 - b.p10));
  dev = std::max(dev, std::abs(a.p01 - b.p01));
  dev = std::max(dev, std::abs(a.p20 - b.p20));
  dev = std::max(dev, std::abs(a.p11 - b.p11));
  dev = std::max(dev, std::abs(a.p02 - b.p02));
  for (std::size_t i = 0; i < 9; ++i) dev = std::max(dev, std::abs(a.rho2[i] - b.rho2[i]));
  return dev;
}

HomMetrics hom_metrics(const OutputStatistics& stats) {
  HomMetrics m;
  m.coincidence = stats.p11;
  m.total_efficiency = stats.two_photon_trace();
  const double tr = stats.two_photon_trace();
  if (tr > 0.0) {
    m.bunching_conditional = (stats.p20 + stats.p02) / tr;
    // <NOON| rho2 |NOON>, |NOON> = (|2,0> - |0,2>)/sqrt(2).
    const double noon =
        0.5 * (stats.rho2[0].real() - stats.rho2[2].real() - stats.rho2[6].real() +
               stats.rho2[8].real());
    m.noon_fidelity = std::clamp(noon / tr, 0.0, 1.0);
    m.bunching_conditional = std::clamp(*m.bunching_conditional, 0.0, 1.0);
  }
  return m;
}

namespace {

cplx interpolate_linear(const TimeGrid& grid, std::span<const cplx> samples, double x) {
  if (x < grid.node(0) || x > grid.node(grid.size() - 1)) return 0.0;
  std::size_t hi = 1;
  while (hi < grid.size() - 1 && grid.node(hi) < x) ++hi;
  const double t0 = grid.node(hi - 1), t1 = grid.node(hi);
  const double u = (x - t0) / (t1 - t0);
  return (1.0 - u) * samples[hi - 1] + u * samples[hi];
}

}  // namespace

TemporalEnvelope delayed_envelope(const TemporalEnvelope& base, double delay,
                                  const std::function<cplx(double)>& sampler,
                                  double* truncated_weight) {
  const TimeGrid& grid = base.grid();
  if (std::abs(delay) >= grid.window())
    throw invalid_parameter("delay moves the envelope entirely outside [0, T_W]");
  std::vector<cplx> shifted(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.node(k) - delay;
    if (x < 0.0 || x > grid.window()) {
      shifted[k] = 0.0;
    } else {
      shifted[k] = sampler ? sampler(x) : interpolate_linear(grid, base.samples(), x);
    }
  }
  double raw = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) raw += grid.weight(k) * std::norm(shifted[k]);
  if (truncated_weight) *truncated_weight = std::clamp(1.0 - raw, 0.0, 1.0);
  if (!(raw > 1e-300))
    throw invalid_parameter("delayed envelope has no weight left inside [0, T_W]");
  return TemporalEnvelope::from_samples(grid, std::move(shifted));
}

std::vector<DelayPoint> delay_sweep(const SchmidtDecomposition& dec,
                                    const TemporalEnvelope& base,
                                    std::span<const double> delays, std::size_t mode_cutoff,
                                    const DelaySweepOptions& opts) {
  if (!(base.grid() == dec.grid()))
    throw invalid_parameter("delay_sweep: envelope grid does not match decomposition");
  for (double d : delays)
    if (std::abs(d) >= dec.grid().window())
      throw invalid_parameter("delay_sweep: |delay| must stay below T_W");

  const std::int64_t count = static_cast<std::int64_t>(delays.size());
  std::vector<DelayPoint> points(delays.size());
  std::vector<std::exception_ptr> errors(delays.size());

  const auto evaluate = [&](std::int64_t idx) {
    try {
      DelayPoint& pt = points[idx];
      pt.delay = delays[idx];
      TemporalEnvelope shifted =
          delayed_envelope(base, pt.delay, opts.sampler, &pt.truncated_weight);
      TwoPhotonInput input(dec, base, std::move(shifted));
      pt.statistics = analytic_statistics(input, mode_cutoff, opts.statistics);
      pt.metrics = hom_metrics(pt.statistics);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  };

  if (opts.exec == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) evaluate(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) evaluate(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return points;
}

}  // namespace homsim
