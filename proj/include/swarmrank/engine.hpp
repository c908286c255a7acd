#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swarmrank/grammar.hpp"
#include "swarmrank/graph.hpp"

namespace swarmrank {

/// An indivisible walker: current node c_i, energy eps_i, FSM state, origin.
struct Particle {
  NodeId current;
  double energy = 1.0;
  std::string state;
  NodeId origin;
};

/// Accumulated activation per node (the vector e). Entries are non-negative
/// and never decrease during a run.
using EnergyVector = std::map<NodeId, double>;

struct MonteCarloMode {
  std::uint64_t seed = 0;
  int particles_per_source = 100000;
};

struct DeterministicMode {
  // fragments whose probability-weighted energy falls below this are dropped
  double branch_prune_threshold = 1e-12;
};

struct SwarmConfig {
  double decay = 0.0;                   // global decay delta in [0, 1]
  double energy_threshold = 1e-6;       // particle dies when post-decay energy drops below
  int max_epochs = 50;                  // epoch cap k
  double convergence_tolerance = 1e-6;  // on 1 - cosine of successive output rankings
  int max_steps_per_particle = 10000;   // safety valve for zero-decay cycles
  std::variant<DeterministicMode, MonteCarloMode> mode = DeterministicMode{};
  std::vector<NodeId> inputs;           // I: one particle (or batch) per member, per epoch
  std::vector<NodeId> outputs;          // O: the ranked set
  TraversalContext context;
  int threads = 0;                      // 0: SWARMRANK_THREADS env var, else hardware

  bool is_monte_carlo() const { return std::holds_alternative<MonteCarloMode>(mode); }
};

struct EpochStats {
  long long steps = 0;           // node visits (deposits) this epoch
  long long step_cap_hits = 0;   // particles/fragments still alive at the step cap
};

struct RunResult {
  std::map<NodeId, double> ranking;      // normalized over O, sums to 1
  EnergyVector raw_energy;               // every node that received energy
  int epochs_run = 0;
  std::vector<double> convergence_trace; // cosine of rankings at epochs (t, t+1), from t=1
  long long steps_taken = 0;
  bool converged = false;
  std::vector<EpochStats> epoch_stats;   // one entry per epoch run
};

enum class DeathReason { Terminal, NoEdge, Exhausted, StepCap };

struct StepOutcome {
  bool moved = false;
  DeathReason death = DeathReason::Terminal;  // valid when !moved
};

/// e[p.current] += p.energy, then p.energy *= (1 - decay). Deposit precedes
/// decay; a particle therefore deposits its pre-decay energy.
void deposit_and_decay(Particle& p, EnergyVector& e, double decay);

/// One reference step: deposit and decay, then die at a terminal sort, die
/// with no admissible edge, die exhausted, or move to the sampled target.
/// `sampler` returns a uniform draw in [0, 1). The engine's batched modes
/// compute the same walk semantics on dense tables.
StepOutcome step(Particle& p, const Network& net, const TraversalGrammar& g,
                 const TraversalContext& ctx, const std::function<double()>& sampler,
                 EnergyVector& e, double decay, double energy_threshold);

/// One epoch: distribute particles to the input set and propagate every one
/// to death, accumulating deposits into `e`.
EpochStats run_epoch(const Network& net, const TraversalGrammar& g, const SwarmConfig& cfg,
                     EnergyVector& e);

/// Full run: epochs until the output ranking stabilizes (1 - cosine within
/// tolerance) or the epoch cap is reached. Throws NoOutputEnergy when no
/// particle ever reaches O.
RunResult run(const Network& net, const TraversalGrammar& g, const SwarmConfig& cfg);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Restriction of `e` to `outputs`, normalized to sum 1.
std::map<NodeId, double> normalize_output(const EnergyVector& e,
                                          const std::vector<NodeId>& outputs);

/// CSV: epoch,cosine,total_steps,alive_particles_end
void write_trace_csv(const RunResult& r, std::ostream& out);

/// Worker count the engine will actually use for `cfg`.
int resolve_thread_count(int requested);

} // namespace swarmrank
