#include "truncreg/truncation.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "truncreg/dataset_io.hpp"
#include "truncreg/errors.hpp"
#include "truncreg/special.hpp"

namespace truncreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const std::vector<Interval>& pieces) {
  if (pieces.empty()) throw GrammarError("truncation set has no intervals");
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const auto& p = pieces[j];
    if (std::isnan(p.lo) || std::isnan(p.hi))
      throw GrammarError("truncation interval endpoint is NaN");
    if (!(p.lo < p.hi))
      throw GrammarError("truncation interval is empty: lo >= hi");
    if (j > 0 && !(pieces[j - 1].hi < p.lo))
      throw GrammarError("truncation intervals must be sorted and disjoint");
  }
}
}  // namespace

TruncationSet TruncationSet::intervals(std::vector<Interval> pieces) {
  validate(pieces);
  TruncationSet s;
  s.pieces_ = std::move(pieces);
  return s;
}

TruncationSet TruncationSet::real_line() {
  return intervals({{-kInf, kInf}});
}

TruncationSet TruncationSet::oracle(std::function<bool(double)> member) {
  TruncationSet s;
  s.oracle_ = std::move(member);
  return s;
}

const std::vector<Interval>& TruncationSet::pieces() const {
  if (oracle_)
    throw std::logic_error("pieces() called on an oracle truncation set");
  return pieces_;
}

bool TruncationSet::contains(double y) const {
  if (oracle_) return oracle_(y);
  for (const auto& p : pieces_) {
    if (y < p.lo) return false;  // sorted: no later piece can contain y
    if (y <= p.hi) return true;
  }
  return false;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

double parse_endpoint(std::string_view tok) {
  tok = trim(tok);
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  double v = 0.0;
  const auto* begin = tok.data();
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw GrammarError("bad interval endpoint: '" + std::string(tok) + "'");
  return v;
}

}  // namespace

TruncationSet TruncationSet::parse(std::string_view text) {
  std::vector<Interval> pieces;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find_first_of("Uu", pos);
    std::string_view piece = trim(text.substr(
        pos, next == std::string_view::npos ? std::string_view::npos
                                            : next - pos));
    if (piece.empty()) throw GrammarError("empty interval in truncation set");
    if (piece.front() == '[' || piece.front() == '(') piece.remove_prefix(1);
    if (!piece.empty() && (piece.back() == ']' || piece.back() == ')'))
      piece.remove_suffix(1);
    const std::size_t comma = piece.find(',');
    if (comma == std::string_view::npos)
      throw GrammarError("interval needs two comma-separated endpoints: '" +
                         std::string(piece) + "'");
    pieces.push_back({parse_endpoint(piece.substr(0, comma)),
                      parse_endpoint(piece.substr(comma + 1))});
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return intervals(std::move(pieces));
}

std::string TruncationSet::format() const {
  const auto& ps = pieces();
  std::string out;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (j) out += "U";
    out += std::isinf(ps[j].lo) ? "(-inf" : "[" + format_double(ps[j].lo);
    out += ",";
    out += std::isinf(ps[j].hi) ? "inf)" : format_double(ps[j].hi) + "]";
  }
  return out;
}

Survival survival_probability(double mean, double sigma,
                              const TruncationSet& set, std::size_t mc_budget,
                              Rng& rng) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("survival_probability: sigma must be > 0");
  if (set.is_interval_union()) {
    double alpha = 0.0;
    for (const auto& p : set.pieces())
      alpha += normal_interval_mass((p.lo - mean) / sigma,
                                    (p.hi - mean) / sigma);
    if (alpha > 1.0) alpha = 1.0;
    return {alpha, 0.0};
  }
  if (mc_budget == 0)
    throw ZeroBudget("oracle survival estimation needs mc_budget >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mc_budget; ++i)
    if (set.contains(mean + sigma * rng.normal())) ++hits;
  const double p = static_cast<double>(hits) / static_cast<double>(mc_budget);
  const double se =
      std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(mc_budget));
  return {p, se};
}

Survival survival_probability(double mean, double sigma,
                              const TruncationSet& set,
                              std::size_t mc_budget) {
  Rng rng(0x5eedu);
  return survival_probability(mean, sigma, set, mc_budget, rng);
}

}  // namespace truncreg
