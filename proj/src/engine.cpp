#include "swarmrank/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace swarmrank {

namespace {

// --- deterministic per-particle random streams -------------------------------

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// counter-based stream: scheduling can never affect a particle's draws
struct SplitMix64 {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    return mix64(z);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t particle_stream_seed(std::uint64_t seed, std::uint64_t origin_hash, int epoch,
                                   std::uint64_t particle_index) {
  std::uint64_t s = mix64(seed ^ 0x7F4A7C15C0FFEE01ull);
  s = mix64(s ^ origin_hash);
  s = mix64(s ^ static_cast<std::uint64_t>(epoch));
  s = mix64(s ^ particle_index);
  return s;
}

// --- resolved step table ------------------------------------------------------

struct Cell {
  enum Kind : std::uint8_t { Terminal, Dead, Branch, Mismatch } kind = Dead;
  std::uint16_t next_state = 0;
  std::vector<std::uint32_t> targets;
  std::vector<double> probs;  // normalized over the admissible set
  std::vector<double> cdf;    // cumulative, last entry forced to 1.0
};

/// Guards and the uses layer are static for a run, so every (state, node)
/// pair resolves to a fixed admissible distribution up front.
struct StepTable {
  std::size_t node_count = 0;
  std::uint16_t start_state = 0;
  std::vector<Cell> cells;  // state-major: cells[state * node_count + node]

  const Cell& at(std::uint16_t state, std::uint32_t node) const {
    return cells[static_cast<std::size_t>(state) * node_count + node];
  }
};

StepTable build_step_table(const Network& net, const TraversalGrammar& g,
                           const TraversalContext& ctx) {
  const std::size_t n = net.node_count();
  const auto& states = g.states();
  if (states.size() > 0xFFFF) fail(Errc::InvalidConfig, "too many grammar states");

  // resolve guard inputs once
  std::set<NodeIndex> solution_idx;
  for (const auto& id : ctx.problem_solutions) solution_idx.insert(net.index_of(id));
  std::vector<char> has_voted(n, 0);
  bool has_voted_ready = false;
  auto ensure_voted = [&] {
    if (has_voted_ready) return;
    if (!ctx.problem)
      fail(Errc::InvalidConfig, "TargetHasVotedOn guard requires an active problem");
    for (NodeIndex i = 0; i < n; ++i)
      if (net.node_at(i).sort == Sort::Human) has_voted[i] = net.has_voted_on(i, solution_idx);
    has_voted_ready = true;
  };
  std::map<std::string, std::vector<char>> set_membership;
  auto membership = [&](const std::string& name) -> const std::vector<char>& {
    auto it = set_membership.find(name);
    if (it != set_membership.end()) return it->second;
    std::vector<char> m(n, 0);
    for (const auto& id : ctx.named_set(name))
      if (net.has_node(id)) m[net.index_of(id)] = 1;
    return set_membership.emplace(name, std::move(m)).first->second;
  };

  // virtual uses layer, index form
  std::map<NodeIndex, std::vector<std::pair<NodeIndex, double>>> uses_layer;
  if (ctx.uses_edges) {
    for (const auto& [human, edges] : *ctx.uses_edges) {
      auto& v = uses_layer[net.index_of(human)];
      for (const auto& [target, w] : edges)
        if (w > 0.0) v.emplace_back(net.index_of(target), w);
    }
  }

  StepTable table;
  table.node_count = n;
  table.start_state = static_cast<std::uint16_t>(g.state_index(g.start_state()));
  table.cells.resize(states.size() * n);

  for (std::size_t si = 0; si < states.size(); ++si) {
    const GrammarState& st = states[si];
    for (NodeIndex ni = 0; ni < n; ++ni) {
      Cell& cell = table.cells[si * n + ni];
      const Node& node = net.node_at(ni);
      if (g.is_terminal(node.sort)) {
        cell.kind = Cell::Terminal;
        continue;
      }
      if (node.sort != st.sort) {
        cell.kind = Cell::Mismatch;
        continue;
      }
      for (const Rule& rule : st.rules) {
        std::vector<std::uint32_t> targets;
        std::vector<double> weights;
        auto admit = [&](NodeIndex target, double w) {
          if (w <= 0.0) return;
          switch (rule.guard.kind) {
            case GuardKind::None:
              break;
            case GuardKind::TargetHasVotedOn:
              ensure_voted();
              if (!has_voted[target]) return;
              break;
            case GuardKind::CurrentInSet:
              if (!membership(rule.guard.set_name)[ni]) return;
              break;
            case GuardKind::TargetInSet:
              if (!membership(rule.guard.set_name)[target]) return;
              break;
          }
          targets.push_back(target);
          weights.push_back(w);
        };
        if (rule.label == "uses" && ctx.uses_edges) {
          auto it = uses_layer.find(ni);
          if (it != uses_layer.end())
            for (const auto& [t, w] : it->second) admit(t, w);
        } else {
          for (std::uint32_t ei : net.out_edge_indices(ni, rule.label)) {
            const Edge& e = net.edge_at(ei);
            admit(net.index_of(e.target), e.weight);
          }
        }
        if (targets.empty()) continue;
        double total = 0.0;
        for (double w : weights) total += w;
        cell.kind = Cell::Branch;
        cell.next_state = static_cast<std::uint16_t>(g.state_index(rule.next_state));
        cell.targets = std::move(targets);
        cell.probs.resize(cell.targets.size());
        cell.cdf.resize(cell.targets.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < cell.targets.size(); ++k) {
          cell.probs[k] = weights[k] / total;
          acc += cell.probs[k];
          cell.cdf[k] = acc;
        }
        cell.cdf.back() = 1.0;
        break;
      }
    }
  }
  return table;
}

[[noreturn]] void throw_mismatch(const Network& net, const TraversalGrammar& g,
                                 std::uint16_t state, std::uint32_t node) {
  const GrammarState& st = g.states()[state];
  fail(Errc::SortMismatch, "particle in state '" + st.id + "' (" + sort_name(st.sort) +
                               ") arrived at '" + net.node_at(node).id + "' (" +
                               sort_name(net.node_at(node).sort) + ")");
}

// --- walk kernels -------------------------------------------------------------

struct WalkParams {
  double keep = 1.0;            // 1 - decay
  double energy_threshold = 1e-6;
  double prune = 1e-12;         // deterministic mode only
  int step_cap = 10000;
};

struct Accumulator {
  std::vector<long double> energy;
  EpochStats stats;
};

/// Deterministic frame: expected-value expansion of one seed particle.
/// Fragments carry (probability mass, particle energy) separately because
/// exhaustion depends on the unscaled energy, exactly as in a sampled walk.
struct Fragment {
  std::uint32_t node;
  std::uint16_t state;
  int depth;
  double prob;
  double energy;
};

void walk_deterministic(const Network& net, const TraversalGrammar& g, const StepTable& table,
                        const WalkParams& wp, std::uint32_t source, Accumulator& acc) {
  std::vector<Fragment> stack;
  stack.push_back(Fragment{source, table.start_state, 0, 1.0, 1.0});
  while (!stack.empty()) {
    Fragment f = stack.back();
    stack.pop_back();
    acc.energy[f.node] += static_cast<long double>(f.prob) * f.energy;
    acc.stats.steps++;
    const Cell& cell = table.at(f.state, f.node);
    if (cell.kind == Cell::Terminal || cell.kind == Cell::Dead) continue;
    if (cell.kind == Cell::Mismatch) throw_mismatch(net, g, f.state, f.node);
    double e_next = f.energy * wp.keep;
    if (e_next < wp.energy_threshold) continue;
    if (f.depth + 1 > wp.step_cap) {
      acc.stats.step_cap_hits++;
      continue;
    }
    for (std::size_t k = 0; k < cell.targets.size(); ++k) {
      double p = f.prob * cell.probs[k];
      if (p * e_next < wp.prune) continue;
      stack.push_back(Fragment{cell.targets[k], cell.next_state, f.depth + 1, p, e_next});
    }
  }
}

void walk_monte_carlo(const Network& net, const TraversalGrammar& g, const StepTable& table,
                      const WalkParams& wp, std::uint32_t source, SplitMix64& rng,
                      Accumulator& acc) {
  std::uint32_t node = source;
  std::uint16_t state = table.start_state;
  double energy = 1.0;
  int depth = 0;
  for (;;) {
    acc.energy[node] += energy;
    acc.stats.steps++;
    const Cell& cell = table.at(state, node);
    if (cell.kind == Cell::Terminal || cell.kind == Cell::Dead) return;
    if (cell.kind == Cell::Mismatch) throw_mismatch(net, g, state, node);
    energy *= wp.keep;
    if (energy < wp.energy_threshold) return;
    if (++depth > wp.step_cap) {
      acc.stats.step_cap_hits++;
      return;
    }
    double u = rng.uniform();
    std::size_t k =
        std::upper_bound(cell.cdf.begin(), cell.cdf.end(), u) - cell.cdf.begin();
    if (k >= cell.targets.size()) k = cell.targets.size() - 1;
    node = cell.targets[k];
    state = cell.next_state;
  }
}

// --- chunked execution --------------------------------------------------------
//
// Work is split into chunks whose layout depends only on the configuration,
// each chunk accumulates into its own vector, and chunks merge in index
// order. Results are therefore bitwise identical for any worker count.

struct EpochPlan {
  const Network* net;
  const TraversalGrammar* grammar;
  const StepTable* table;
  WalkParams wp;
  std::vector<std::uint32_t> sources;
  bool monte_carlo = false;
  std::uint64_t seed = 0;
  std::uint64_t particles_per_source = 0;
  std::vector<std::uint64_t> origin_hash;  // per source
  int epoch = 0;

  std::uint64_t total_particles() const { return sources.size() * particles_per_source; }

  std::uint64_t chunk_size() const {
    if (!monte_carlo) return 1;  // one chunk per source
    std::uint64_t total = total_particles();
    std::uint64_t size = 8192;
    if (total / size > 256) size = (total + 255) / 256;
    return size;
  }

  std::uint64_t chunk_count() const {
    if (!monte_carlo) return sources.size();
    std::uint64_t total = total_particles();
    return (total + chunk_size() - 1) / chunk_size();
  }

  void run_chunk(std::uint64_t chunk, Accumulator& acc) const {
    if (!monte_carlo) {
      walk_deterministic(*net, *grammar, *table, wp,
                         sources[static_cast<std::size_t>(chunk)], acc);
      return;
    }
    std::uint64_t begin = chunk * chunk_size();
    std::uint64_t end = std::min(begin + chunk_size(), total_particles());
    for (std::uint64_t gidx = begin; gidx < end; ++gidx) {
      std::size_t si = static_cast<std::size_t>(gidx / particles_per_source);
      std::uint64_t pidx = gidx % particles_per_source;
      SplitMix64 rng{particle_stream_seed(seed, origin_hash[si], epoch, pidx)};
      walk_monte_carlo(*net, *grammar, *table, wp, sources[si], rng, acc);
    }
  }
};

void execute_epoch(const EpochPlan& plan, int threads, std::vector<long double>& energy,
                   EpochStats& stats) {
  const std::uint64_t chunks = plan.chunk_count();
  const std::size_t n = energy.size();
  std::vector<Accumulator> partial(chunks);
  int workers = static_cast<int>(std::min<std::uint64_t>(
      static_cast<std::uint64_t>(std::max(threads, 1)), std::max<std::uint64_t>(chunks, 1)));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      partial[c].energy.assign(n, 0.0L);
      plan.run_chunk(c, partial[c]);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        std::uint64_t c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          partial[c].energy.assign(n, 0.0L);
          plan.run_chunk(c, partial[c]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  for (std::uint64_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < n; ++i) energy[i] += partial[c].energy[i];
    stats.steps += partial[c].stats.steps;
    stats.step_cap_hits += partial[c].stats.step_cap_hits;
  }
}

EpochPlan make_plan(const Network& net, const TraversalGrammar& g, const SwarmConfig& cfg,
                    const StepTable& table) {
  if (cfg.inputs.empty()) fail(Errc::InvalidConfig, "input set I is empty");
  if (cfg.outputs.empty()) fail(Errc::InvalidConfig, "output set O is empty");
  if (!(cfg.decay >= 0.0 && cfg.decay <= 1.0))
    fail(Errc::InvalidConfig, "decay must lie in [0, 1]");
  if (!(cfg.energy_threshold > 0.0))
    fail(Errc::InvalidConfig, "energy threshold must be positive");
  if (cfg.max_epochs < 1) fail(Errc::InvalidConfig, "epoch cap must be positive");
  if (cfg.max_steps_per_particle < 1) fail(Errc::InvalidConfig, "step cap must be positive");

  EpochPlan plan;
  plan.net = &net;
  plan.grammar = &g;
  plan.table = &table;
  plan.wp.keep = 1.0 - cfg.decay;
  plan.wp.energy_threshold = cfg.energy_threshold;
  plan.wp.step_cap = cfg.max_steps_per_particle;
  for (const auto& id : cfg.inputs) plan.sources.push_back(net.index_of(id));
  if (const auto* mc = std::get_if<MonteCarloMode>(&cfg.mode)) {
    if (mc->particles_per_source < 1)
      fail(Errc::InvalidConfig, "particles-per-source must be positive");
    plan.monte_carlo = true;
    plan.seed = mc->seed;
    plan.particles_per_source = static_cast<std::uint64_t>(mc->particles_per_source);
    for (const auto& id : cfg.inputs) plan.origin_hash.push_back(fnv1a64(id));
  } else {
    const auto& det = std::get<DeterministicMode>(cfg.mode);
    if (!(det.branch_prune_threshold >= 0.0))
      fail(Errc::InvalidConfig, "branch prune threshold must be non-negative");
    plan.wp.prune = det.branch_prune_threshold;
    plan.particles_per_source = 1;
  }
  return plan;
}

} // namespace

// --- public reference operations ----------------------------------------------

void deposit_and_decay(Particle& p, EnergyVector& e, double decay) {
  e[p.current] += p.energy;
  p.energy *= (1.0 - decay);
}

StepOutcome step(Particle& p, const Network& net, const TraversalGrammar& g,
                 const TraversalContext& ctx, const std::function<double()>& sampler,
                 EnergyVector& e, double decay, double energy_threshold) {
  deposit_and_decay(p, e, decay);
  if (g.is_terminal(net.node(p.current).sort)) return StepOutcome{false, DeathReason::Terminal};
  Admissible adm = admissible_edges(g, p.state, p.current, net, ctx);
  if (adm.died()) return StepOutcome{false, DeathReason::NoEdge};
  if (p.energy < energy_threshold) return StepOutcome{false, DeathReason::Exhausted};
  const Rule& rule = g.state(p.state).rules[static_cast<std::size_t>(adm.rule_index)];
  auto dist = normalize_distribution(adm.edges);
  double u = sampler();
  double acc = 0.0;
  NodeId chosen = dist.rbegin()->first;
  for (const auto& [target, prob] : dist) {
    acc += prob;
    if (u < acc) {
      chosen = target;
      break;
    }
  }
  p.current = chosen;
  p.state = rule.next_state;
  return StepOutcome{true, DeathReason::Terminal};
}

EpochStats run_epoch(const Network& net, const TraversalGrammar& g, const SwarmConfig& cfg,
                     EnergyVector& e) {
  StepTable table = build_step_table(net, g, cfg.context);
  EpochPlan plan = make_plan(net, g, cfg, table);
  std::vector<long double> energy(net.node_count(), 0.0L);
  EpochStats stats;
  execute_epoch(plan, resolve_thread_count(cfg.threads), energy, stats);
  for (std::size_t i = 0; i < energy.size(); ++i)
    if (energy[i] > 0.0L) e[net.node_at(i).id] += static_cast<double>(energy[i]);
  return stats;
}

RunResult run(const Network& net, const TraversalGrammar& g, const SwarmConfig& cfg) {
  StepTable table = build_step_table(net, g, cfg.context);
  EpochPlan plan = make_plan(net, g, cfg, table);
  const int threads = resolve_thread_count(cfg.threads);

  std::vector<std::uint32_t> outputs;
  for (const auto& id : cfg.outputs) outputs.push_back(net.index_of(id));

  std::vector<long double> energy(net.node_count(), 0.0L);
  RunResult result;
  std::vector<double> prev_ranking;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    plan.epoch = epoch;
    EpochStats stats;
    execute_epoch(plan, threads, energy, stats);
    result.epoch_stats.push_back(stats);
    result.steps_taken += stats.steps;
    result.epochs_run = epoch;

    long double total = 0.0L;
    for (auto i : outputs) total += energy[i];
    std::vector<double> ranking;
    double cos = std::numeric_limits<double>::quiet_NaN();
    if (total > 0.0L) {
      ranking.resize(outputs.size());
      for (std::size_t k = 0; k < outputs.size(); ++k)
        ranking[k] = static_cast<double>(energy[outputs[k]] / total);
      if (!prev_ranking.empty()) cos = cosine_similarity(prev_ranking, ranking);
    }
    if (epoch >= 2) result.convergence_trace.push_back(cos);
    if (!ranking.empty()) prev_ranking = std::move(ranking);
    if (!std::isnan(cos) && 1.0 - cos <= cfg.convergence_tolerance) {
      result.converged = true;
      break;
    }
  }

  if (prev_ranking.empty())
    fail(Errc::NoOutputEnergy, "no particle ever reached the output set");

  for (std::size_t k = 0; k < outputs.size(); ++k)
    result.ranking[net.node_at(outputs[k]).id] = prev_ranking[k];
  for (std::size_t i = 0; i < energy.size(); ++i)
    if (energy[i] > 0.0L) result.raw_energy[net.node_at(i).id] = static_cast<double>(energy[i]);
  return result;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    fail(Errc::InvalidConfig, "cosine similarity needs equal-length vectors");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) fail(Errc::ZeroVector, "cosine similarity of a zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::map<NodeId, double> normalize_output(const EnergyVector& e,
                                          const std::vector<NodeId>& outputs) {
  double total = 0.0;
  for (const auto& id : outputs) {
    auto it = e.find(id);
    if (it != e.end()) total += it->second;
  }
  if (!(total > 0.0)) fail(Errc::ZeroTotalWeight, "output set received no energy");
  std::map<NodeId, double> out;
  for (const auto& id : outputs) {
    auto it = e.find(id);
    out[id] = it == e.end() ? 0.0 : it->second / total;
  }
  return out;
}

void write_trace_csv(const RunResult& r, std::ostream& out) {
  out << "epoch,cosine,total_steps,alive_particles_end\n";
  char buf[64];
  for (std::size_t i = 0; i < r.epoch_stats.size(); ++i) {
    out << (i + 1) << ',';
    double cos = std::numeric_limits<double>::quiet_NaN();
    if (i >= 1 && i - 1 < r.convergence_trace.size()) cos = r.convergence_trace[i - 1];
    if (std::isnan(cos)) {
      out << "nan";
    } else {
      std::snprintf(buf, sizeof buf, "%.12g", cos);
      out << buf;
    }
    out << ',' << r.epoch_stats[i].steps << ',' << r.epoch_stats[i].step_cap_hits << '\n';
  }
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SWARMRANK_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace swarmrank
