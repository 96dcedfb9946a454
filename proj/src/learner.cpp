#include "nbll/learner.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nbll/errors.hpp"

namespace nbll {

namespace {
constexpr const char* kFormat = "nbll-counters";
constexpr int kVersion = 1;
}  // namespace

BayesCounters::BayesCounters(std::vector<int> capacities, std::size_t pair_count)
    : capacities_(std::move(capacities)), pair_blocked_(pair_count, 0), pair_total_(pair_count, 0) {
  if (pair_count == 0) throw ConfigError("counters need at least one node pair");
  offset_.reserve(capacities_.size());
  std::size_t total = 0;
  for (int w : capacities_) {
    if (w < 1) throw ConfigError("link capacity must be >= 1");
    offset_.push_back(total);
    total += static_cast<std::size_t>(w) + 1;
  }
  occ_blocked_.assign(total, 0);
  occ_total_.assign(total, 0);
}

void BayesCounters::check_link(LinkId j, int u) const {
  if (j >= capacities_.size()) throw ConsistencyError("link index " + std::to_string(j) + " out of range");
  if (u < 0 || u > capacities_[j])
    throw ConsistencyError("occupancy " + std::to_string(u) + " outside [0, " + std::to_string(capacities_[j]) +
                           "] on link " + std::to_string(j));
}

void BayesCounters::observe(std::span<const int> snapshot, PairId pair, bool blocked) {
  if (snapshot.size() != capacities_.size()) throw ConsistencyError("snapshot size does not match link count");
  if (pair >= pair_total_.size()) throw ConsistencyError("pair index out of range");
  for (LinkId j = 0; j < snapshot.size(); ++j) check_link(j, snapshot[j]);

  ++arrivals_;
  ++pair_total_[pair];
  for (LinkId j = 0; j < snapshot.size(); ++j) ++occ_total_[offset_[j] + snapshot[j]];
  if (blocked) {
    ++blocked_;
    ++pair_blocked_[pair];
    for (LinkId j = 0; j < snapshot.size(); ++j) ++occ_blocked_[offset_[j] + snapshot[j]];
  }
}

bool BayesCounters::compatible(const BayesCounters& other) const {
  return capacities_ == other.capacities_ && pair_total_.size() == other.pair_total_.size();
}

BayesCounters& BayesCounters::merge(const BayesCounters& other) {
  if (!compatible(other)) throw ConfigError("cannot merge counters built for different topologies");
  arrivals_ += other.arrivals_;
  blocked_ += other.blocked_;
  for (std::size_t i = 0; i < occ_total_.size(); ++i) {
    occ_blocked_[i] += other.occ_blocked_[i];
    occ_total_[i] += other.occ_total_[i];
  }
  for (std::size_t i = 0; i < pair_total_.size(); ++i) {
    pair_blocked_[i] += other.pair_blocked_[i];
    pair_total_[i] += other.pair_total_[i];
  }
  return *this;
}

BayesCounters BayesCounters::minus(const BayesCounters& other) const {
  if (!compatible(other)) throw ConfigError("cannot subtract counters built for different topologies");
  auto sub = [](std::uint64_t a, std::uint64_t b) {
    if (b > a) throw ConsistencyError("counter subtraction would go negative");
    return a - b;
  };
  BayesCounters out = *this;
  out.arrivals_ = sub(arrivals_, other.arrivals_);
  out.blocked_ = sub(blocked_, other.blocked_);
  for (std::size_t i = 0; i < occ_total_.size(); ++i) {
    out.occ_blocked_[i] = sub(occ_blocked_[i], other.occ_blocked_[i]);
    out.occ_total_[i] = sub(occ_total_[i], other.occ_total_[i]);
  }
  for (std::size_t i = 0; i < pair_total_.size(); ++i) {
    out.pair_blocked_[i] = sub(pair_blocked_[i], other.pair_blocked_[i]);
    out.pair_total_[i] = sub(pair_total_[i], other.pair_total_[i]);
  }
  return out;
}

bool BayesCounters::consistent() const {
  if (blocked_ > arrivals_) return false;
  for (LinkId j = 0; j < capacities_.size(); ++j) {
    std::uint64_t b = 0, t = 0;
    for (int u = 0; u <= capacities_[j]; ++u) {
      b += occ_blocked(j, u);
      t += occ_total(j, u);
      if (occ_blocked(j, u) > occ_total(j, u)) return false;
    }
    if (b != blocked_ || t != arrivals_) return false;
  }
  std::uint64_t pb = 0, pt = 0;
  for (std::size_t i = 0; i < pair_total_.size(); ++i) {
    pb += pair_blocked_[i];
    pt += pair_total_[i];
  }
  return pb == blocked_ && pt == arrivals_;
}

std::string BayesCounters::to_json() const {
  using json = nlohmann::ordered_json;
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["capacities"] = capacities_;
  doc["pairs"] = pair_total_.size();
  doc["arrivals"] = arrivals_;
  doc["blocked"] = blocked_;
  json ob = json::array(), ot = json::array();
  for (LinkId j = 0; j < capacities_.size(); ++j) {
    auto first = occ_blocked_.begin() + static_cast<std::ptrdiff_t>(offset_[j]);
    auto first_t = occ_total_.begin() + static_cast<std::ptrdiff_t>(offset_[j]);
    ob.push_back(std::vector<std::uint64_t>(first, first + capacities_[j] + 1));
    ot.push_back(std::vector<std::uint64_t>(first_t, first_t + capacities_[j] + 1));
  }
  doc["occ_blocked"] = std::move(ob);
  doc["occ_total"] = std::move(ot);
  doc["pair_blocked"] = pair_blocked_;
  doc["pair_total"] = pair_total_;
  return doc.dump() + "\n";
}

BayesCounters BayesCounters::from_json(const std::string& text) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
    if (doc.at("format") != kFormat) throw ConfigError("not a counter checkpoint");
    if (doc.at("version") != kVersion) throw ConfigError("unsupported counter checkpoint version");
    BayesCounters c(doc.at("capacities").get<std::vector<int>>(), doc.at("pairs").get<std::size_t>());
    c.arrivals_ = doc.at("arrivals").get<std::uint64_t>();
    c.blocked_ = doc.at("blocked").get<std::uint64_t>();
    const auto& ob = doc.at("occ_blocked");
    const auto& ot = doc.at("occ_total");
    if (ob.size() != c.capacities_.size() || ot.size() != c.capacities_.size())
      throw ConfigError("histogram count does not match link count");
    for (LinkId j = 0; j < c.capacities_.size(); ++j) {
      auto b = ob[j].get<std::vector<std::uint64_t>>();
      auto t = ot[j].get<std::vector<std::uint64_t>>();
      if (b.size() != static_cast<std::size_t>(c.capacities_[j]) + 1 || t.size() != b.size())
        throw ConfigError("histogram size does not match capacity on link " + std::to_string(j));
      std::copy(b.begin(), b.end(), c.occ_blocked_.begin() + static_cast<std::ptrdiff_t>(c.offset_[j]));
      std::copy(t.begin(), t.end(), c.occ_total_.begin() + static_cast<std::ptrdiff_t>(c.offset_[j]));
    }
    c.pair_blocked_ = doc.at("pair_blocked").get<std::vector<std::uint64_t>>();
    c.pair_total_ = doc.at("pair_total").get<std::vector<std::uint64_t>>();
    if (c.pair_blocked_.size() != c.pair_total_.size() || c.pair_total_.size() != doc.at("pairs").get<std::size_t>())
      throw ConfigError("pair vector size mismatch");
    if (!c.consistent()) throw ConfigError("counter checkpoint violates marginal identities");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed counter checkpoint: ") + e.what());
  }
}

void BayesCounters::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json();
  if (!out) throw ConfigError("write failed for " + path);
}

BayesCounters BayesCounters::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

void check_occ(const BayesCounters& c, LinkId j, int u) {
  if (j >= c.link_count() || u < 0 || u > c.capacity(j)) throw ConfigError("occupancy out of range");
}

void check_pair(const BayesCounters& c, PairId sd) {
  if (sd >= c.pair_count()) throw ConfigError("pair index out of range");
}

}  // namespace

double p_block_prior(const BayesCounters& c) {
  return (static_cast<double>(c.blocked()) + 1.0) / (static_cast<double>(c.arrivals()) + 2.0);
}

double p_occ_given_block(const BayesCounters& c, LinkId j, int u) {
  check_occ(c, j, u);
  return (static_cast<double>(c.occ_blocked(j, u)) + 1.0) /
         (static_cast<double>(c.blocked()) + c.capacity(j) + 1.0);
}

double p_occ(const BayesCounters& c, LinkId j, int u) {
  check_occ(c, j, u);
  return (static_cast<double>(c.occ_total(j, u)) + 1.0) / (static_cast<double>(c.arrivals()) + c.capacity(j) + 1.0);
}

double p_pair_given_block(const BayesCounters& c, PairId sd) {
  check_pair(c, sd);
  return (static_cast<double>(c.pair_blocked(sd)) + 1.0) /
         (static_cast<double>(c.blocked()) + static_cast<double>(c.pair_count()));
}

double p_pair(const BayesCounters& c, PairId sd) {
  check_pair(c, sd);
  return (static_cast<double>(c.pair_total(sd)) + 1.0) /
         (static_cast<double>(c.arrivals()) + static_cast<double>(c.pair_count()));
}

double traffic_weight(const BayesCounters& c, PairId sd) { return p_pair(c, sd); }

double link_log_ratio(const BayesCounters& c, LinkId j, int u) {
  const double w1 = c.capacity(j) + 1.0;
  return std::log(static_cast<double>(c.occ_blocked(j, u)) + 1.0) -
         std::log(static_cast<double>(c.blocked()) + w1) -
         std::log(static_cast<double>(c.occ_total(j, u)) + 1.0) +
         std::log(static_cast<double>(c.arrivals()) + w1);
}

double compensated_sum(std::span<const double> terms) {
  double sum = 0.0, carry = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::fabs(sum) >= std::fabs(t))
      carry += (sum - next) + t;
    else
      carry += (t - next) + sum;
    sum = next;
  }
  return sum + carry;
}

namespace {

std::vector<double> link_terms(const BayesCounters& c, std::span<const int> snapshot) {
  if (snapshot.size() != c.link_count()) throw ConsistencyError("snapshot size does not match link count");
  std::vector<double> terms(snapshot.size());
  for (LinkId j = 0; j < snapshot.size(); ++j) {
    if (snapshot[j] < 0 || snapshot[j] > c.capacity(j)) throw ConsistencyError("snapshot exceeds capacity");
    terms[j] = link_log_ratio(c, j, snapshot[j]);
  }
  return terms;
}

}  // namespace

Prediction predict_pair_bp(const BayesCounters& c, std::span<const int> snapshot, PairId sd) {
  Prediction p;
  p.log_terms = link_terms(c, snapshot);
  const double log_links = compensated_sum(p.log_terms);
  p.value = p_block_prior(c) * std::exp(log_links) * (p_pair_given_block(c, sd) / p_pair(c, sd));
  return p;
}

double pair_mix(const BayesCounters& c) {
  std::vector<double> terms(c.pair_count());
  for (PairId sd = 0; sd < c.pair_count(); ++sd)
    terms[sd] = traffic_weight(c, sd) * (p_pair_given_block(c, sd) / p_pair(c, sd));
  return compensated_sum(terms);
}

double predict_network_bp(const BayesCounters& c, std::span<const int> snapshot) {
  const auto terms = link_terms(c, snapshot);
  return p_block_prior(c) * std::exp(compensated_sum(terms)) * pair_mix(c);
}

}  // namespace nbll
