#include "swiss/outcome.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace swiss {

namespace {

void checkStrength(double s) {
  if (!(s >= kMinStrength && s <= kMaxStrength))
    fail(ErrorCode::DomainError, "strength " + std::to_string(s) + " outside [1000, 3000]");
}

// Unchecked evaluation; the fitter may wander outside the physical range.
OutcomeDistribution evaluate(double strWhite, double strBlack, const OutcomeModelParams& p) {
  const double mean = (strWhite + strBlack) / 2.0;
  const double level = (mean - kMinStrength) / (kMaxStrength - kMinStrength);
  const double advantage = p.whiteAdvantage * std::exp(p.advantageDecay * (0.5 - level));
  const double expected =
      1.0 / (1.0 + std::pow(10.0, -(strWhite - strBlack + advantage) / p.eloScale));
  const double draw = (p.drawBase + p.drawSlope * level) * 4.0 * expected * (1.0 - expected);
  OutcomeDistribution d;
  d.pDraw = draw;
  d.pWhiteWin = expected - draw / 2.0;
  d.pBlackWin = 1.0 - expected - draw / 2.0;
  return d;
}

}  // namespace

OutcomeDistribution outcomeDistribution(double strWhite, double strBlack,
                                        const OutcomeModelParams& params) {
  checkStrength(strWhite);
  checkStrength(strBlack);
  OutcomeDistribution d = evaluate(strWhite, strBlack, params);
  // Guard against parameter sets that push a component below zero.
  d.pWhiteWin = std::max(0.0, d.pWhiteWin);
  d.pBlackWin = std::max(0.0, d.pBlackWin);
  d.pDraw = std::max(0.0, d.pDraw);
  const double total = d.pWhiteWin + d.pDraw + d.pBlackWin;
  d.pWhiteWin /= total;
  d.pDraw /= total;
  d.pBlackWin = 1.0 - d.pWhiteWin - d.pDraw;
  return d;
}

std::vector<CalibrationTarget> referenceOutcomeTargets() {
  return {
      {1200.0, 1400.0, {0.26, 0.17, 0.57}},
      {2200.0, 2400.0, {0.14, 0.31, 0.55}},
      {2400.0, 2200.0, {0.63, 0.26, 0.11}},
  };
}

OutcomeModelParams calibrationStart() {
  OutcomeModelParams p;
  p.whiteAdvantage = 30.0;
  p.advantageDecay = 0.5;
  p.eloScale = 400.0;
  p.drawBase = 0.1;
  p.drawSlope = 0.3;
  return p;
}

namespace {

constexpr int kParamCount = 5;

OutcomeModelParams unpack(const Eigen::VectorXd& x) {
  return {x[0], x[1], x[2], x[3], x[4]};
}

struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::span<const CalibrationTarget> targets;

  int inputs() const { return kParamCount; }
  int values() const { return static_cast<int>(targets.size() * 3); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const OutcomeModelParams p = unpack(x);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const CalibrationTarget& t = targets[i];
      const OutcomeDistribution d = evaluate(t.strWhite, t.strBlack, p);
      const auto row = static_cast<Eigen::Index>(3 * i);
      fvec[row] = d.pWhiteWin - t.probabilities.pWhiteWin;
      fvec[row + 1] = d.pDraw - t.probabilities.pDraw;
      fvec[row + 2] = d.pBlackWin - t.probabilities.pBlackWin;
    }
    return 0;
  }
};

}  // namespace

CalibrationResult calibrate(std::span<const CalibrationTarget> targets,
                            const OutcomeModelParams& start, double tolerance) {
  if (targets.size() * 3 < kParamCount)
    fail(ErrorCode::CalibrationFailed, "need at least two reference match-ups");
  Eigen::VectorXd x(kParamCount);
  x << start.whiteAdvantage, start.advantageDecay, start.eloScale, start.drawBase,
      start.drawSlope;

  ResidualFunctor functor{targets};
  Eigen::NumericalDiff<ResidualFunctor> numeric(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> solver(numeric);
  solver.parameters.maxfev = 20000;
  solver.parameters.xtol = 1e-12;
  solver.parameters.ftol = 1e-14;
  solver.minimize(x);

  CalibrationResult result;
  result.params = unpack(x);
  Eigen::VectorXd residuals(functor.values());
  functor(x, residuals);
  result.maxResidual = residuals.cwiseAbs().maxCoeff();
  result.sumSquaredError = residuals.squaredNorm();
  if (!std::isfinite(result.maxResidual) || result.maxResidual > tolerance) {
    fail(ErrorCode::CalibrationFailed,
         "largest residual " + std::to_string(result.maxResidual) + " exceeds " +
             std::to_string(tolerance));
  }
  return result;
}

GameResult sampleResult(const OutcomeDistribution& d, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < d.pWhiteWin) return GameResult::WhiteWin;
  if (u < d.pWhiteWin + d.pDraw) return GameResult::Draw;
  // Guard against rounding when pBlackWin == 0.
  if (d.pBlackWin <= 0.0) return d.pDraw > 0.0 ? GameResult::Draw : GameResult::WhiteWin;
  return GameResult::BlackWin;
}

namespace {

std::vector<std::string> splitColon(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

double parseNumber(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::ParseError, "expected a number, got '" + text + "'");
  return value;
}

}  // namespace

std::vector<double> loadRatingFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open rating file " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    values.push_back(parseNumber(line.substr(first, last - first + 1)));
  }
  return values;
}

StrengthDistributionSpec parseStrengthSpec(std::string_view text) {
  const auto parts = splitColon(text);
  const std::string& kind = parts[0];
  StrengthDistributionSpec spec;
  if (kind == "uniform" && parts.size() == 3) {
    spec = UniformStrength{parseNumber(parts[1]), parseNumber(parts[2])};
  } else if ((kind == "exponential" || kind == "exp") && parts.size() == 4) {
    spec = ExponentialStrength{parseNumber(parts[1]), parseNumber(parts[2]), parseNumber(parts[3])};
  } else if (kind == "normal" && parts.size() == 5) {
    spec = NormalStrength{parseNumber(parts[1]), parseNumber(parts[2]), parseNumber(parts[3]),
                          parseNumber(parts[4])};
  } else if (kind == "empirical" && parts.size() == 4) {
    EmpiricalStrength e;
    e.file = parts[1];
    e.lo = parseNumber(parts[2]);
    e.hi = parseNumber(parts[3]);
    for (double v : loadRatingFile(e.file)) {
      if (v >= e.lo && v <= e.hi) e.values.push_back(v);
    }
    spec = std::move(e);
  } else {
    fail(ErrorCode::ParseError, "unrecognised strength distribution '" + std::string(text) + "'");
  }
  validate(spec);
  return spec;
}

std::string describe(const StrengthDistributionSpec& spec) {
  std::ostringstream out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformStrength>) {
          out << "uniform:" << s.lo << ':' << s.hi;
        } else if constexpr (std::is_same_v<T, ExponentialStrength>) {
          out << "exponential:" << s.lo << ':' << s.hi << ':' << s.mean;
        } else if constexpr (std::is_same_v<T, NormalStrength>) {
          out << "normal:" << s.lo << ':' << s.hi << ':' << s.mean << ':' << s.sd;
        } else {
          out << "empirical:" << s.file << ':' << s.lo << ':' << s.hi;
        }
      },
      spec);
  return out.str();
}

void validate(const StrengthDistributionSpec& spec) {
  std::visit(
      [](const auto& s) {
        if (!(s.lo < s.hi)) fail(ErrorCode::InvalidConfig, "strength range needs lo < hi");
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExponentialStrength> || std::is_same_v<T, NormalStrength>) {
          if (!(s.mean > s.lo && s.mean < s.hi))
            fail(ErrorCode::InvalidConfig, "mean must lie inside the strength range");
        }
        if constexpr (std::is_same_v<T, NormalStrength>) {
          if (!(s.sd > 0.0)) fail(ErrorCode::InvalidConfig, "standard deviation must be positive");
        }
        if constexpr (std::is_same_v<T, EmpiricalStrength>) {
          if (s.values.empty())
            fail(ErrorCode::EmptySupport, "no ratings from " + s.file + " fall inside the range");
        }
      },
      spec);
}

double truncatedExponentialRate(double width, double mean) {
  if (!(mean > 0.0 && mean < width / 2.0))
    fail(ErrorCode::DomainError, "truncated exponential mean must lie in (0, width/2)");
  auto truncatedMean = [width](double rate) {
    return 1.0 / rate - width / std::expm1(rate * width);
  };
  // truncatedMean decreases from width/2 (rate -> 0) towards 0.
  double lo = 1e-12 / width;
  double hi = 1.0 / width;
  while (truncatedMean(hi) > mean) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncatedMean(mid) > mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> sampleStrengths(const StrengthDistributionSpec& spec, int n, Rng& rng) {
  if (n < 2) fail(ErrorCode::InvalidConfig, "need at least two players");
  validate(spec);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformStrength>) {
          std::uniform_real_distribution<double> dist(s.lo, s.hi);
          for (int i = 0; i < n; ++i) out.push_back(dist(rng));
        } else if constexpr (std::is_same_v<T, ExponentialStrength>) {
          const double width = s.hi - s.lo;
          const double mid = s.lo + width / 2.0;
          if (s.mean == mid) {
            std::uniform_real_distribution<double> dist(s.lo, s.hi);
            for (int i = 0; i < n; ++i) out.push_back(dist(rng));
            return;
          }
          // Mass piles up at the end of the range nearest to the mean.
          const bool fromTop = s.mean > mid;
          const double offsetMean = fromTop ? s.hi - s.mean : s.mean - s.lo;
          std::exponential_distribution<double> dist(truncatedExponentialRate(width, offsetMean));
          while (static_cast<int>(out.size()) < n) {
            const double x = dist(rng);
            if (x > width) continue;
            out.push_back(fromTop ? s.hi - x : s.lo + x);
          }
        } else if constexpr (std::is_same_v<T, NormalStrength>) {
          std::normal_distribution<double> dist(s.mean, s.sd);
          while (static_cast<int>(out.size()) < n) {
            const double x = dist(rng);
            if (x >= s.lo && x <= s.hi) out.push_back(x);
          }
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, s.values.size() - 1);
          for (int i = 0; i < n; ++i) out.push_back(s.values[pick(rng)]);
        }
      },
      spec);
  return out;
}

double eloNoiseSd(double strength) { return (kMaxStrength - strength) / 20.0; }

int sampleElo(double strength, Rng& rng) {
  if (!(strength <= kMaxStrength)) fail(ErrorCode::DomainError, "strength must not exceed 3000");
  const double sd = eloNoiseSd(strength);
  if (sd <= 0.0) return static_cast<int>(std::lround(strength));
  std::normal_distribution<double> dist(strength, sd);
  return static_cast<int>(std::lround(dist(rng)));
}

}  // namespace swiss
