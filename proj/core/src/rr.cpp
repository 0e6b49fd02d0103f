#include "revmax/rr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "revmax/parallel.hpp"

namespace revmax {

RRSampler::RRSampler(const Graph& graph, const AdCampaign& campaign)
    : graph_(graph), owned_probs_(resolve_probabilities(graph, campaign)), probs_(owned_probs_),
      mark_(graph.node_count(), 0) {}

RRSampler::RRSampler(const Graph& graph, std::span<const double> arc_probabilities)
    : graph_(graph), probs_(arc_probabilities), mark_(graph.node_count(), 0) {}

RRSet RRSampler::sample(Rng& rng) {
    const NodeId n = graph_.node_count();
    if (n == 0) {
        throw std::runtime_error("sample_rr_set: empty graph");
    }
    if (++epoch_ == 0) { // stamp wrap-around
        std::fill(mark_.begin(), mark_.end(), 0);
        epoch_ = 1;
    }
    RRSet set;
    set.target = rng.next_below(n);
    queue_.clear();
    queue_.push_back(set.target);
    mark_[set.target] = epoch_;
    std::size_t head = 0;
    while (head < queue_.size()) {
        const NodeId x = queue_[head++];
        for (ArcId a : graph_.in_arcs(x)) {
            const NodeId u = graph_.arc(a).source;
            if (mark_[u] == epoch_) {
                continue;
            }
            if (rng.next_double() < probs_[a]) {
                mark_[u] = epoch_;
                queue_.push_back(u);
            }
        }
    }
    set.members = queue_;
    std::sort(set.members.begin(), set.members.end());
    return set;
}

RRSet sample_rr_set(const Graph& graph, const AdCampaign& campaign, Rng& rng) {
    RRSampler sampler(graph, campaign);
    return sampler.sample(rng);
}

RRSample::RRSample(AdId ad, NodeId node_count)
    : ad_(ad), n_(node_count), cover_(node_count), alive_cov_(node_count, 0) {}

void RRSample::insert(const RRSet& set) {
    const std::uint32_t index = static_cast<std::uint32_t>(targets_.size());
    targets_.push_back(set.target);
    members_.insert(members_.end(), set.members.begin(), set.members.end());
    offsets_.push_back(members_.size());
    alive_.push_back(1);
    ++alive_count_;
    for (NodeId u : set.members) {
        cover_[u].push_back(index);
        ++alive_cov_[u];
    }
}

std::uint64_t RRSample::remove_covered(NodeId node) {
    std::uint64_t removed = 0;
    for (std::uint32_t index : cover_[node]) {
        if (!alive_[index]) {
            continue;
        }
        alive_[index] = 0;
        --alive_count_;
        ++removed;
        for (NodeId m : members_of(index)) {
            --alive_cov_[m];
        }
    }
    return removed;
}

bool RRSample::coverage_consistent() const {
    std::vector<std::uint64_t> recount(n_, 0);
    std::uint64_t alive = 0;
    for (std::uint64_t i = 0; i < theta(); ++i) {
        if (!alive_[i]) {
            continue;
        }
        ++alive;
        for (NodeId m : members_of(i)) {
            ++recount[m];
        }
    }
    return alive == alive_count_ && recount == alive_cov_;
}

std::uint64_t sample_size_L(NodeId n, NodeId s, double epsilon, double ell,
                            double opt_lower_bound) {
    if (n < 1 || s < 1 || s > n) {
        throw std::invalid_argument("sample_size_L: requires 1 <= s <= n");
    }
    if (!(epsilon > 0.0) || !(ell > 0.0)) {
        throw std::invalid_argument("sample_size_L: epsilon and ell must be positive");
    }
    if (!(opt_lower_bound >= static_cast<double>(s))) {
        throw std::invalid_argument("sample_size_L: opt lower bound below s");
    }
    const double dn = static_cast<double>(n);
    const double ds = static_cast<double>(s);
    const double log_cns = std::lgamma(dn + 1.0) - std::lgamma(ds + 1.0) - std::lgamma(dn - ds + 1.0);
    const double numer = (8.0 + 2.0 * epsilon) * dn * (ell * std::log(dn) + log_cns + std::log(2.0));
    const double value = numer / (opt_lower_bound * epsilon * epsilon);
    return static_cast<std::uint64_t>(std::ceil(value));
}

double estimate_spread(const RRSample& sample, std::span<const NodeId> seeds) {
    if (sample.theta() == 0) {
        throw std::runtime_error("estimate_spread: sample is empty");
    }
    std::vector<std::uint8_t> hit(sample.theta(), 0);
    std::uint64_t covered = 0;
    for (NodeId u : seeds) {
        for (std::uint32_t index : sample.sets_containing(u)) {
            if (!hit[index]) {
                hit[index] = 1;
                ++covered;
            }
        }
    }
    return static_cast<double>(sample.node_count()) * static_cast<double>(covered) /
           static_cast<double>(sample.theta());
}

std::optional<Candidate> select_best_ca_node(const RRSample& sample,
                                             std::span<const std::uint8_t> assigned) {
    Candidate best;
    for (NodeId u = 0; u < sample.node_count(); ++u) {
        if (assigned[u]) {
            continue;
        }
        const std::uint64_t cov = sample.alive_coverage(u);
        if (cov > best.coverage) {
            best = {u, cov};
        }
    }
    if (best.coverage == 0) {
        return std::nullopt;
    }
    return best;
}

namespace {

/// Ratio order for cost-sensitive selection, division-free: compares
/// cov_a/cost_a vs cov_b/cost_b with the zero-cost convention. Returns
/// +1 when a ranks strictly better.
int compare_ratio(std::uint64_t cov_a, double cost_a, std::uint64_t cov_b, double cost_b) {
    const bool inf_a = cost_a <= 0.0;
    const bool inf_b = cost_b <= 0.0;
    if (inf_a != inf_b) {
        return inf_a ? 1 : -1;
    }
    if (inf_a && inf_b) {
        return 0; // both infinite; caller falls through to coverage
    }
    const double lhs = static_cast<double>(cov_a) * cost_b;
    const double rhs = static_cast<double>(cov_b) * cost_a;
    if (lhs > rhs) {
        return 1;
    }
    if (lhs < rhs) {
        return -1;
    }
    return 0;
}

std::optional<Candidate> best_cs_among(const RRSample& sample, std::span<const double> costs,
                                       std::span<const NodeId> nodes) {
    Candidate best;
    double best_cost = 0.0;
    bool found = false;
    for (NodeId u : nodes) {
        const std::uint64_t cov = sample.alive_coverage(u);
        if (cov == 0) {
            continue; // never select useless seeds
        }
        const double cost = costs[u];
        if (!found) {
            best = {u, cov};
            best_cost = cost;
            found = true;
            continue;
        }
        const int cmp = compare_ratio(cov, cost, best.coverage, best_cost);
        if (cmp > 0 || (cmp == 0 && cov > best.coverage)) {
            best = {u, cov};
            best_cost = cost;
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return best;
}

} // namespace

std::optional<Candidate> select_best_cs_node(const RRSample& sample, std::span<const double> costs,
                                             std::span<const std::uint8_t> assigned) {
    Candidate best;
    double best_cost = 0.0;
    bool found = false;
    for (NodeId u = 0; u < sample.node_count(); ++u) {
        if (assigned[u]) {
            continue;
        }
        const std::uint64_t cov = sample.alive_coverage(u);
        if (cov == 0) {
            continue;
        }
        const double cost = costs[u];
        if (!found) {
            best = {u, cov};
            best_cost = cost;
            found = true;
            continue;
        }
        const int cmp = compare_ratio(cov, cost, best.coverage, best_cost);
        if (cmp > 0 || (cmp == 0 && cov > best.coverage)) {
            best = {u, cov};
            best_cost = cost;
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return best;
}

std::optional<Candidate> windowed_select_best_cs_node(const RRSample& sample,
                                                      std::span<const double> costs,
                                                      std::span<const std::uint8_t> assigned,
                                                      std::uint64_t w) {
    if (w < 1) {
        throw std::invalid_argument("windowed_select_best_cs_node: window must be at least 1");
    }
    std::vector<NodeId> unassigned;
    unassigned.reserve(sample.node_count());
    for (NodeId u = 0; u < sample.node_count(); ++u) {
        if (!assigned[u]) {
            unassigned.push_back(u);
        }
    }
    if (unassigned.empty()) {
        return std::nullopt;
    }
    if (w < unassigned.size()) {
        const auto higher = [&](NodeId a, NodeId b) {
            const std::uint64_t ca = sample.alive_coverage(a);
            const std::uint64_t cb = sample.alive_coverage(b);
            return ca != cb ? ca > cb : a < b;
        };
        std::nth_element(unassigned.begin(), unassigned.begin() + static_cast<std::ptrdiff_t>(w - 1),
                         unassigned.end(), higher);
        unassigned.resize(w);
    }
    return best_cs_among(sample, costs, unassigned);
}

void extend_sample(RRSample& sample, const Graph& graph,
                   std::span<const double> arc_probabilities, std::uint64_t additional, Rng& rng) {
    if (additional == 0) {
        return;
    }
    const std::uint64_t base = rng.next_u64();
    const std::uint64_t first = sample.theta();
    constexpr std::uint64_t kChunk = 2048;
    const std::uint64_t chunks = (additional + kChunk - 1) / kChunk;
    std::vector<std::vector<RRSet>> buffers(chunks);
    parallel_for_chunks(additional, kChunk,
                        [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                            RRSampler sampler(graph, arc_probabilities);
                            auto& buf = buffers[c];
                            buf.reserve(end - begin);
                            for (std::uint64_t i = begin; i < end; ++i) {
                                Rng stream = Rng::stream(base, {first + i});
                                buf.push_back(sampler.sample(stream));
                            }
                        });
    for (auto& buf : buffers) {
        for (const RRSet& set : buf) {
            sample.insert(set);
        }
    }
}

void extend_sample(RRSample& sample, const Graph& graph, const AdCampaign& campaign,
                   std::uint64_t additional, Rng& rng) {
    const auto probs = resolve_probabilities(graph, campaign);
    extend_sample(sample, graph, probs, additional, rng);
}

std::uint64_t SeedLedger::total_coverage() const {
    std::uint64_t total = 0;
    for (const Entry& e : entries) {
        total += e.coverage;
    }
    return total;
}

bool SeedLedger::contains(NodeId u) const {
    for (const Entry& e : entries) {
        if (e.node == u) {
            return true;
        }
    }
    return false;
}

double update_estimates(RRSample& sample, SeedLedger& ledger, const AdCampaign& campaign) {
    for (auto& entry : ledger.entries) {
        const std::uint64_t fresh = sample.alive_coverage(entry.node);
        if (fresh > 0) {
            entry.coverage += fresh;
            sample.remove_covered(entry.node);
        }
    }
    if (sample.theta() == 0) {
        return 0.0;
    }
    return campaign.cpe * static_cast<double>(sample.node_count()) *
           static_cast<double>(ledger.total_coverage()) / static_cast<double>(sample.theta());
}

std::uint64_t latent_seed_size_update(std::uint64_t s_current, double budget,
                                      double payment_current, double c_max, double cpe, NodeId n,
                                      double f_max) {
    const double remaining = budget - payment_current;
    const double denominator = c_max + cpe * static_cast<double>(n) * f_max;
    if (!(remaining > 0.0) || !(denominator > 0.0)) {
        return s_current;
    }
    return s_current + static_cast<std::uint64_t>(std::floor(remaining / denominator));
}

double pilot_greedy_fraction(const RRSample& sample, std::uint64_t pilot_size, std::uint64_t s) {
    const std::uint64_t pilot = std::min<std::uint64_t>(pilot_size, sample.theta());
    if (pilot == 0 || s == 0) {
        return 0.0;
    }
    std::vector<std::uint64_t> degree(sample.node_count(), 0);
    for (std::uint64_t i = 0; i < pilot; ++i) {
        for (NodeId m : sample.members_of(i)) {
            ++degree[m];
        }
    }
    std::vector<std::uint8_t> covered(pilot, 0);
    std::uint64_t covered_count = 0;
    for (std::uint64_t round = 0; round < s; ++round) {
        NodeId best = kInvalidNode;
        std::uint64_t best_deg = 0;
        for (NodeId u = 0; u < sample.node_count(); ++u) {
            if (degree[u] > best_deg) {
                best_deg = degree[u];
                best = u;
            }
        }
        if (best == kInvalidNode) {
            break;
        }
        for (std::uint32_t index : sample.sets_containing(best)) {
            if (index >= pilot || covered[index]) {
                continue;
            }
            covered[index] = 1;
            ++covered_count;
            for (NodeId m : sample.members_of(index)) {
                --degree[m];
            }
        }
    }
    return static_cast<double>(covered_count) / static_cast<double>(pilot);
}

double pilot_opt_lower_bound(const RRSample& sample, std::uint64_t s, double epsilon,
                             std::uint64_t pilot_size) {
    const double fraction = pilot_greedy_fraction(sample, pilot_size, s);
    const double pilot_bound =
        (1.0 - epsilon) * static_cast<double>(sample.node_count()) * fraction;
    return std::max(static_cast<double>(s), pilot_bound);
}

namespace {

void write_varint(std::ofstream& out, std::uint64_t value) {
    while (value >= 0x80) {
        out.put(static_cast<char>((value & 0x7f) | 0x80));
        value >>= 7;
    }
    out.put(static_cast<char>(value));
}

std::uint64_t read_varint(std::ifstream& in) {
    std::uint64_t value = 0;
    int shift = 0;
    for (;;) {
        const int c = in.get();
        if (c == EOF) {
            throw std::runtime_error("rr snapshot: truncated varint");
        }
        value |= static_cast<std::uint64_t>(c & 0x7f) << shift;
        if (!(c & 0x80)) {
            return value;
        }
        shift += 7;
        if (shift > 63) {
            throw std::runtime_error("rr snapshot: varint overflow");
        }
    }
}

} // namespace

void save_rr_sample(const RRSample& sample, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_rr_sample: cannot open " + path.string());
    }
    out.write("RRS1", 4);
    const std::uint64_t theta = sample.theta();
    for (int b = 0; b < 8; ++b) {
        out.put(static_cast<char>((theta >> (8 * b)) & 0xff));
    }
    for (std::uint64_t i = 0; i < theta; ++i) {
        const auto members = sample.members_of(i);
        write_varint(out, members.size());
        for (NodeId m : members) {
            write_varint(out, m);
        }
    }
}

RRSample load_rr_sample(const std::filesystem::path& path, AdId ad, NodeId node_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_rr_sample: cannot open " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string_view(magic, 4) != "RRS1") {
        throw std::runtime_error("load_rr_sample: bad magic");
    }
    std::uint64_t theta = 0;
    for (int b = 0; b < 8; ++b) {
        const int c = in.get();
        if (c == EOF) {
            throw std::runtime_error("load_rr_sample: truncated header");
        }
        theta |= static_cast<std::uint64_t>(c) << (8 * b);
    }
    RRSample sample(ad, node_count);
    for (std::uint64_t i = 0; i < theta; ++i) {
        RRSet set;
        const std::uint64_t size = read_varint(in);
        set.members.reserve(size);
        for (std::uint64_t k = 0; k < size; ++k) {
            const std::uint64_t m = read_varint(in);
            if (m >= node_count) {
                throw std::runtime_error("load_rr_sample: member out of range");
            }
            set.members.push_back(static_cast<NodeId>(m));
        }
        if (set.members.empty()) {
            throw std::runtime_error("load_rr_sample: empty RR set");
        }
        set.target = set.members.front();
        sample.insert(set);
    }
    return sample;
}

} // namespace revmax
