#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swiss/core.hpp"

namespace swiss {

struct OutcomeDistribution {
  double pWhiteWin = 0.0;
  double pDraw = 0.0;
  double pBlackWin = 0.0;
};

/// Parameters of the match-outcome surrogate.
///
/// Expected score of white follows a logistic curve in
/// (strWhite - strBlack + advantage(mu)) / eloScale where mu is the mean
/// strength and advantage(mu) = whiteAdvantage * exp(advantageDecay * (0.5 - m)),
/// m = (mu - 1000) / 2000. The draw share is
/// (drawBase + drawSlope * m) * 4 E (1 - E), which peaks for evenly matched
/// games and decays with the strength gap; wins and losses split the rest so
/// that the expected score stays E.
struct OutcomeModelParams {
  double whiteAdvantage = 39.4440814;
  double advantageDecay = 1.78620523;
  double eloScale = 453.613546;
  double drawBase = 0.134659091;
  double drawSlope = 0.356098739;
};

inline constexpr double kMinStrength = 1000.0;
inline constexpr double kMaxStrength = 3000.0;

/// Throws DomainError for strengths outside [1000, 3000].
OutcomeDistribution outcomeDistribution(double strWhite, double strBlack,
                                        const OutcomeModelParams& params = {});

struct CalibrationTarget {
  double strWhite = 0.0;
  double strBlack = 0.0;
  OutcomeDistribution probabilities;
};

/// The three reference match-ups with published outcome probabilities.
std::vector<CalibrationTarget> referenceOutcomeTargets();

struct CalibrationResult {
  OutcomeModelParams params;
  double maxResidual = 0.0;
  double sumSquaredError = 0.0;
};

OutcomeModelParams calibrationStart();

/// Least-squares fit of the model family to `targets` (Levenberg-Marquardt).
/// Throws CalibrationFailed when some probability stays more than
/// `tolerance` away from its target.
CalibrationResult calibrate(std::span<const CalibrationTarget> targets,
                            const OutcomeModelParams& start = calibrationStart(),
                            double tolerance = 0.04);

GameResult sampleResult(const OutcomeDistribution& distribution, Rng& rng);

struct UniformStrength {
  double lo = 1400.0;
  double hi = 2200.0;
};
struct ExponentialStrength {
  double lo = 1400.0;
  double hi = 2200.0;
  double mean = 2000.0;  // mean of the truncated distribution
};
struct NormalStrength {
  double lo = 1400.0;
  double hi = 2200.0;
  double mean = 1800.0;
  double sd = 200.0;
};
struct EmpiricalStrength {
  std::string file;
  double lo = 1400.0;
  double hi = 2200.0;
  std::vector<double> values;  // loaded ratings, already restricted to [lo, hi]
};

using StrengthDistributionSpec =
    std::variant<UniformStrength, ExponentialStrength, NormalStrength, EmpiricalStrength>;

/// Parses "uniform:LO:HI", "exponential:LO:HI:MEAN", "normal:LO:HI:MEAN:SD" and
/// "empirical:FILE:LO:HI" (the file is loaded immediately).
StrengthDistributionSpec parseStrengthSpec(std::string_view text);
std::string describe(const StrengthDistributionSpec& spec);
void validate(const StrengthDistributionSpec& spec);

/// Plain text, one rating per line, '#' starts a comment.
std::vector<double> loadRatingFile(const std::filesystem::path& path);

/// Rate of the exponential whose truncation to [0, width] has the given mean
/// (mean < width / 2).
double truncatedExponentialRate(double width, double mean);

std::vector<double> sampleStrengths(const StrengthDistributionSpec& spec, int n, Rng& rng);

/// Elo observation: Normal(str, (3000 - str) / 20) rounded to an integer.
int sampleElo(double strength, Rng& rng);
double eloNoiseSd(double strength);

}  // namespace swiss
