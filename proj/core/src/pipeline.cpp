#include "nav2goal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nav2goal/checkpoint.hpp"
#include "nav2goal/io_util.hpp"
#include "nav2goal/svg.hpp"
#include "nav2goal/trajectory_store.hpp"

namespace nav2goal::pipeline {

namespace fs = std::filesystem;

namespace stream {
constexpr std::uint64_t kWorldSeeds = 0x57000;
constexpr std::uint64_t kBcSplit = 0xB0001;
constexpr std::uint64_t kBcInit = 0xB0002;
constexpr std::uint64_t kBcTrain = 0xB0003;
constexpr std::uint64_t kGcSplit = 0x6C001;
constexpr std::uint64_t kGcInit = 0x6C002;
constexpr std::uint64_t kGcTrain = 0x6C003;
constexpr std::uint64_t kGcValidation = 0x6C004;
constexpr std::uint64_t kSplice = 0x5B000;
constexpr std::uint64_t kMission = 0x3A000;
constexpr std::uint64_t kCompareWorld = 0xC0000;
constexpr std::uint64_t kCompareLayout = 0xC1000;
constexpr std::uint64_t kCompareTrial = 0xC2000;
}  // namespace stream

std::vector<std::uint64_t> world_seeds(const RunConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.worlds; ++i) seeds.push_back(make_rng(cfg.seed, stream::kWorldSeeds + i)());
  return seeds;
}

namespace {

std::vector<sim::World> worlds_from(const std::vector<std::uint64_t>& seeds, const sim::WorldParams& params) {
  std::vector<sim::World> worlds;
  worlds.reserve(seeds.size());
  for (auto s : seeds) worlds.push_back(sim::generate_world(s, params));
  return worlds;
}

}  // namespace

std::vector<sim::World> make_worlds(const RunConfig& cfg) { return worlds_from(world_seeds(cfg), cfg.world); }

std::vector<hindsight::Trajectory> collect_bc(const RunConfig& cfg, const std::vector<sim::World>& worlds) {
  return expert::collect_bc_dataset(worlds, cfg.collect, cfg.seed, cfg.expert, cfg.camera);
}

TrainedPolicy train_bc(const RunConfig& cfg, const std::vector<hindsight::Trajectory>& dataset) {
  if (dataset.size() < 2) throw PipelineError("train-bc: need at least two trajectories");
  Rng split_rng = make_rng(cfg.seed, stream::kBcSplit);
  const auto split = net::split_by_trajectory(dataset.size(), cfg.bc_train.validation_split, split_rng);
  const auto train_ex = net::frame_examples(dataset, split.train);
  const auto val_ex = net::frame_examples(dataset, split.validation);

  net::Architecture arch = cfg.bc_arch;
  arch.fusion = net::GoalFusion::none;
  TrainedPolicy out{net::PolicyNetwork(arch), {}};
  Rng init_rng = make_rng(cfg.seed, stream::kBcInit);
  out.net.initialize(init_rng);
  net::FrameBatchSource source(train_ex);
  Rng train_rng = make_rng(cfg.seed, stream::kBcTrain);
  out.report = net::train(out.net, source, val_ex, cfg.bc_train, train_rng);
  net::quantize_to_float(out.net);
  return out;
}

std::vector<hindsight::Trajectory> collect_explore(const RunConfig& cfg, const std::vector<sim::World>& worlds,
                                                   const net::PolicyNetwork& behaviour) {
  rollout::RolloutSetup setup{cfg.explore, cfg.mission.decoder, cfg.mission.noise, cfg.mission.estimator, cfg.camera};
  return rollout::collect_explore_dataset(worlds, behaviour, cfg.explore_collect, setup, cfg.seed);
}

TrainedPolicy train_gc(const RunConfig& cfg, const std::vector<hindsight::Trajectory>& dataset,
                       const net::PolicyNetwork* warm, net::GoalFusion fusion) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset[i].collision && dataset[i].length() >= 2) usable.push_back(i);
  }
  if (usable.size() < 2) throw PipelineError("train-gc: need at least two collision-free trajectories");
  Rng split_rng = make_rng(cfg.seed, stream::kGcSplit);
  const auto split = net::split_by_trajectory(usable.size(), cfg.gc.train.validation_split, split_rng);
  std::vector<std::size_t> train_idx, val_idx;
  for (auto i : split.train) train_idx.push_back(usable[i]);
  for (auto i : split.validation) val_idx.push_back(usable[i]);

  const hindsight::RelabelSampler train_sampler(dataset, cfg.relabel, &train_idx);
  const hindsight::RelabelSampler val_sampler(dataset, cfg.relabel, &val_idx);
  Rng val_rng = make_rng(cfg.seed, stream::kGcValidation);
  std::vector<net::Example> val_ex;
  for (const auto& s : val_sampler.draw_batch(static_cast<std::size_t>(cfg.gc.validation_samples), val_rng)) {
    val_ex.push_back(hindsight::to_example(s));
  }

  net::Architecture arch = cfg.bc_arch;
  arch.fusion = fusion;
  arch.goal_format = cfg.gc.goal_format;
  TrainedPolicy out{net::PolicyNetwork(arch), {}};
  Rng init_rng = make_rng(cfg.seed, stream::kGcInit);
  out.net.initialize(init_rng);
  net::TrainConfig train = cfg.gc.train;
  if (warm && cfg.gc.warm_start) {
    out.net.copy_matching(*warm);
    if (cfg.gc.freeze_backbone) {
      train.frozen = {"conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias", "fc.weight", "fc.bias"};
    }
  }
  hindsight::RelabelBatchSource source(train_sampler, static_cast<std::size_t>(cfg.gc.samples_per_epoch));
  Rng train_rng = make_rng(cfg.seed, stream::kGcTrain);
  out.report = net::train(out.net, source, val_ex, train, train_rng);
  net::quantize_to_float(out.net);
  return out;
}

std::vector<Vec2> goal_sweep(double radius, int count) {
  std::vector<Vec2> goals;
  for (int i = 0; i < count; ++i) {
    const double a = -kPi + kTwoPi * (i + 0.5) / count;
    goals.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return goals;
}

double goal_sensitivity(const net::PolicyNetwork& net, std::span<const sim::Observation* const> observations,
                        const std::vector<Vec2>& sweep) {
  if (!net.arch().goal_conditioned()) throw std::invalid_argument("goal_sensitivity: network has no goal input");
  if (observations.empty() || sweep.empty()) return 0.0;
  net::ForwardCache cache;
  double total = 0.0;
  for (const auto* obs : observations) {
    const auto input = net::encode_observation(*obs, net.arch());
    std::vector<double> e;
    for (const auto& g : sweep) {
      net.forward(input, g, nullptr, cache);
      e.push_back(expected_class(cache.heads.yaw));
    }
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    total += var / static_cast<double>(e.size());
  }
  return total / static_cast<double>(observations.size());
}

std::vector<const sim::Observation*> probe_observations(const std::vector<hindsight::Trajectory>& dataset,
                                                        std::size_t count) {
  std::vector<const sim::Observation*> all;
  for (const auto& t : dataset) {
    for (const auto& r : t.records) all.push_back(&r.observation);
  }
  std::vector<const sim::Observation*> out;
  if (all.empty() || count == 0) return out;
  const std::size_t n = std::min(count, all.size());
  for (std::size_t i = 0; i < n; ++i) out.push_back(all[i * all.size() / n]);
  return out;
}

csv::Writer fusion_ablation_csv(const FusionAblation& a) {
  csv::Writer w({"fusion", "goal_sensitivity"});
  w.add("multiply").add(a.multiply).end_row();
  w.add("concatenate").add(a.concatenate).end_row();
  return w;
}

std::vector<mission::SplicedMission> splice_missions(const RunConfig& cfg,
                                                     const std::vector<hindsight::Trajectory>& store) {
  std::vector<mission::SplicedMission> out;
  for (int m = 0; m < cfg.missions; ++m) {
    Rng rng = make_rng(cfg.seed, stream::kSplice + m);
    out.push_back(mission::splice_waypoints(store, cfg.splice, rng));
  }
  return out;
}

csv::Writer splice_report_csv(const std::vector<mission::SplicedMission>& missions,
                              const std::vector<mission::ReplayResult>& replays) {
  csv::Writer w({"mission", "world_seed", "segments", "path_length", "waypoints", "complete", "replay_max_distance"});
  for (std::size_t i = 0; i < missions.size(); ++i) {
    const auto& m = missions[i];
    w.add(i).add(std::to_string(m.world_seed)).add(m.segments.size()).add(m.path_length);
    w.add(m.mission.waypoints.size()).add(m.complete ? 1 : 0);
    w.add(i < replays.size() ? replays[i].max_distance : 0.0).end_row();
  }
  return w;
}

namespace {

sim::RobotState mission_start(const mission::Mission& m) {
  if (!m.start) throw PipelineError("mission has no start pose");
  sim::RobotState s;
  s.pose = *m.start;
  return s;
}

}  // namespace

std::vector<mission::MissionLog> run_missions(const RunConfig& cfg,
                                              const std::vector<mission::SplicedMission>& missions,
                                              mission::Policy& policy) {
  std::map<std::uint64_t, sim::World> worlds;
  std::vector<mission::MissionLog> logs;
  for (std::size_t i = 0; i < missions.size(); ++i) {
    const auto& m = missions[i];
    auto it = worlds.find(m.world_seed);
    if (it == worlds.end()) it = worlds.emplace(m.world_seed, sim::generate_world(m.world_seed, cfg.world)).first;
    const auto seed = make_rng(cfg.seed, stream::kMission + i)();
    logs.push_back(mission::run_mission(it->second, policy, m.mission, m.start, cfg.mission, seed));
  }
  return logs;
}

csv::Writer mission_summary_csv(const std::vector<mission::MissionLog>& logs) {
  csv::Writer w({"mission", "policy", "reached", "total", "end", "steps", "collisions", "overshoots"});
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto& l = logs[i];
    const auto overshoots = std::count_if(l.passes.begin(), l.passes.end(), [](const auto& p) { return p.overshoot; });
    w.add(i).add(l.policy).add(l.reached).add(l.waypoints.size()).add(mission::to_string(l.end));
    w.add(l.steps.size()).add(l.collisions).add(static_cast<long long>(overshoots)).end_row();
  }
  return w;
}

double CompareReport::time_ratio() const {
  if (greedy_summary.mean_steps_paired <= 0.0) return 0.0;
  return gc_summary.mean_steps_paired / greedy_summary.mean_steps_paired;
}

PolicySummary summarize(const std::string& policy, const std::vector<eval::TrialResult>& trials,
                        const std::vector<eval::TrialResult>& other) {
  PolicySummary s;
  s.policy = policy;
  if (trials.empty()) return s;
  int reached = 0, paired = 0;
  double steps_paired = 0.0, steps = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    s.mean_cumulative_coral += t.cumulative_coral;
    s.mean_coral_sum += t.coral_sum;
    steps += t.steps;
    s.collisions += t.collisions;
    if (t.reached_goal()) ++reached;
    if (t.reached_goal() && i < other.size() && other[i].reached_goal()) {
      steps_paired += t.steps_to_completion;
      ++paired;
    }
  }
  const double n = static_cast<double>(trials.size());
  s.mean_cumulative_coral /= n;
  s.mean_coral_sum /= n;
  s.mean_steps = steps / n;
  s.reach_rate = reached / n;
  s.mean_steps_paired = paired ? steps_paired / paired : 0.0;
  return s;
}

CompareReport compare_policies(const RunConfig& cfg, const net::PolicyNetwork& gc) {
  if (!gc.arch().goal_conditioned()) throw PipelineError("compare: policy checkpoint is not goal-conditioned");
  const auto& cc = cfg.compare;
  sim::WorldParams wp = cfg.world;
  wp.relief_amplitude = cc.relief_amplitude;
  wp.obstacle_density = cc.obstacle_density;
  mission::NetworkPolicy gc_policy(gc, cc.dropout, "goal-conditioned");
  mission::GreedyPolicy greedy;

  CompareReport r;
  for (int k = 0; k < cc.trials; ++k) {
    const auto world = sim::generate_world(make_rng(cfg.seed, stream::kCompareWorld + k)(), wp);
    Rng layout = make_rng(cfg.seed, stream::kCompareLayout + k);
    sim::RobotState start;
    Vec2 goal{};
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      start = expert::sample_start_state(world, cc.start_region, cc.start_altitude, layout);
      const double d = uniform(layout, cc.goal_min, cc.goal_max);
      const double a = uniform(layout, -kPi, kPi);
      goal = start.pose.planar() + Vec2{std::cos(a), std::sin(a)} * d;
      placed = world.contains(goal.x, goal.y);
    }
    if (!placed) throw PipelineError("compare: could not place a goal inside the world");
    mission::Mission m;
    m.waypoints = {goal};
    m.threshold = cfg.splice.threshold;
    m.timeout = cfg.splice.timeout;
    const auto trial_seed = make_rng(cfg.seed, stream::kCompareTrial + k)();
    r.gc_logs.push_back(mission::run_mission(world, gc_policy, m, start, cfg.mission, trial_seed));
    r.greedy_logs.push_back(mission::run_mission(world, greedy, m, start, cfg.mission, trial_seed));
    r.gc.push_back(eval::trial_result(k, r.gc_logs.back()));
    r.greedy.push_back(eval::trial_result(k, r.greedy_logs.back()));
    r.starts.push_back(start.pose.planar());
    r.goals.push_back(goal);
  }
  r.gc_summary = summarize(gc_policy.name(), r.gc, r.greedy);
  r.greedy_summary = summarize(greedy.name(), r.greedy, r.gc);
  for (std::size_t i = 0; i < r.gc.size(); ++i) {
    if (r.gc[i].reached_goal() && r.greedy[i].reached_goal()) ++r.paired_completions;
  }
  return r;
}

csv::Writer compare_trials_csv(const CompareReport& r) {
  csv::Writer w({"trial", "policy", "cumulative_coral", "coral_sum", "reached", "steps_to_completion", "steps",
                 "collisions", "start_x", "start_y", "goal_x", "goal_y"});
  for (std::size_t i = 0; i < r.gc.size(); ++i) {
    for (const auto* t : {&r.gc[i], &r.greedy[i]}) {
      w.add(t->trial).add(t->policy).add(t->cumulative_coral).add(t->coral_sum).add(t->reached_goal() ? 1 : 0);
      w.add(t->steps_to_completion).add(t->steps).add(t->collisions);
      w.add(r.starts[i].x).add(r.starts[i].y).add(r.goals[i].x).add(r.goals[i].y).end_row();
    }
  }
  return w;
}

csv::Writer compare_summary_csv(const CompareReport& r) {
  csv::Writer w({"policy", "mean_cumulative_coral", "mean_coral_sum", "reach_rate", "mean_steps",
                 "mean_steps_paired", "collisions"});
  for (const auto* s : {&r.gc_summary, &r.greedy_summary}) {
    w.add(s->policy).add(s->mean_cumulative_coral).add(s->mean_coral_sum).add(s->reach_rate).add(s->mean_steps);
    w.add(s->mean_steps_paired).add(s->collisions).end_row();
  }
  return w;
}

std::string compare_coral_svg(const CompareReport& r) {
  plot::LineChart chart;
  chart.title = "Cumulative coral visibility";
  chart.x_label = "step";
  chart.y_label = "running mean coral fraction";
  auto add = [&](const std::vector<eval::TrialResult>& trials, const std::string& color) {
    for (const auto& t : trials) {
      plot::Series s;
      s.label = t.policy;
      s.color = color;
      s.opacity = 0.45;
      s.y = eval::cumulative_mean(t.coral_series);
      for (std::size_t i = 0; i < s.y.size(); ++i) s.x.push_back(static_cast<double>(i));
      chart.series.push_back(std::move(s));
    }
  };
  add(r.gc, "#1a9641");
  add(r.greedy, "#d7191c");
  return plot::render_line_chart(chart);
}

std::string compare_paths_svg(const CompareReport& r, int max_trials) {
  plot::MapPlot map;
  map.title = "Trajectories relative to start";
  const auto n = std::min<std::size_t>(r.gc_logs.size(), static_cast<std::size_t>(std::max(0, max_trials)));
  auto track = [](const mission::MissionLog& log, const Vec2& origin) {
    std::vector<Vec2> pts;
    for (const auto& s : log.steps) pts.push_back(s.true_pose.planar() - origin);
    return pts;
  };
  for (std::size_t i = 0; i < n; ++i) {
    map.paths.push_back({"goal-conditioned " + std::to_string(i), track(r.gc_logs[i], r.starts[i]), "#1a9641", 0.9});
    map.paths.push_back({"greedy " + std::to_string(i), track(r.greedy_logs[i], r.starts[i]), "#d7191c", 0.9});
    map.markers.push_back(r.goals[i] - r.starts[i]);
  }
  map.markers.push_back({0.0, 0.0});
  return plot::render_map(map);
}

csv::Writer training_log_csv(const net::TrainReport& report) {
  csv::Writer w({"epoch", "train_loss", "val_yaw_acc", "val_pitch_acc"});
  w.add(0).add("").add(report.initial_val_yaw_acc).add(report.initial_val_pitch_acc).end_row();
  for (const auto& e : report.epochs) w.add(e.epoch).add(e.train_loss).add(e.val_yaw_acc).add(e.val_pitch_acc).end_row();
  return w;
}

std::string mission_log_svg(const csv::Table& table, const std::string& title) {
  plot::MapPlot map;
  map.title = title;
  plot::PathLayer truth{"true", {}, "#2b83ba", 1.0};
  plot::PathLayer estimate{"estimated", {}, "#fdae61", 0.9};
  const bool has_est = std::find(table.columns.begin(), table.columns.end(), "est_x") != table.columns.end();
  const bool has_wp = std::find(table.columns.begin(), table.columns.end(), "wp_x") != table.columns.end();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    truth.points.push_back({table.number(i, "x"), table.number(i, "y")});
    if (has_est) estimate.points.push_back({table.number(i, "est_x"), table.number(i, "est_y")});
    if (has_wp) {
      const Vec2 wp{table.number(i, "wp_x"), table.number(i, "wp_y")};
      if (map.markers.empty() || !(map.markers.back() == wp)) map.markers.push_back(wp);
    }
  }
  map.paths.push_back(std::move(truth));
  if (has_est) map.paths.push_back(std::move(estimate));
  return plot::render_map(map);
}

namespace {

fs::path require(const RunConfig& cfg, const std::string& command, const char* name) {
  const fs::path p = cfg.out_dir / name;
  if (!fs::exists(p)) throw PipelineError(command + ": missing artifact " + p.string() + " (" + name + ")");
  return p;
}

std::vector<std::uint64_t> read_world_seeds(const fs::path& path) {
  const auto table = csv::read(path);
  const auto col = table.column("seed");
  std::vector<std::uint64_t> seeds;
  for (const auto& row : table.rows) seeds.push_back(std::stoull(row.at(col)));
  if (seeds.empty()) throw PipelineError(path.string() + " lists no worlds");
  return seeds;
}

std::string mission_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mission_%02zu.txt", i);
  return buf;
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02zu%s", stem, i, ext);
  return buf;
}

std::vector<mission::SplicedMission> read_missions(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir / artifact::kMissionDir;
  std::vector<mission::SplicedMission> out;
  for (std::size_t i = 0;; ++i) {
    const fs::path p = dir / mission_file(i);
    if (!fs::exists(p)) break;
    const auto bytes = io::read_file(p);
    mission::SplicedMission m;
    m.mission = mission::parse_mission(std::string(bytes.begin(), bytes.end()));
    if (!m.mission.world_seed || !m.mission.start) {
      throw PipelineError(p.string() + ": run-mission needs 'world' and 'start' lines");
    }
    m.world_seed = *m.mission.world_seed;
    m.start = mission_start(m.mission);
    out.push_back(std::move(m));
  }
  if (out.empty()) throw PipelineError("run-mission: missing artifact " + (dir / mission_file(0)).string());
  return out;
}

void report_training(std::ostream& log, const std::string& what, const net::TrainReport& r) {
  log << what << ": " << r.train_examples << " train / " << r.val_examples << " validation examples";
  if (!r.epochs.empty()) {
    log << ", final validation yaw " << r.epochs.back().val_yaw_acc << " pitch " << r.epochs.back().val_pitch_acc;
  }
  log << '\n';
}

bool logs_reproduce(const std::vector<mission::MissionLog>& logs, const std::vector<eval::TrialResult>& results,
                    const std::vector<std::string>& csv_texts) {
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto table = csv::parse(csv_texts[i]);
    const auto again = eval::trial_from_csv(results[i].trial, results[i].policy,
                                            static_cast<int>(logs[i].waypoints.size()), table);
    if (again.cumulative_coral != results[i].cumulative_coral || again.coral_sum != results[i].coral_sum ||
        again.waypoints_reached != results[i].waypoints_reached ||
        again.steps_to_completion != results[i].steps_to_completion || again.collisions != results[i].collisions) {
      return false;
    }
  }
  return true;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.out_dir);
  const auto path = [&](const char* name) { return cfg.out_dir / name; };

  if (command == "gen-world") {
    const auto worlds = make_worlds(cfg);
    csv::Writer w({"world", "seed", "coral_fraction", "rock_fraction"});
    for (std::size_t i = 0; i < worlds.size(); ++i) {
      w.add(i).add(std::to_string(worlds[i].seed())).add(worlds[i].coral_fraction());
      w.add(worlds[i].class_fraction(sim::SurfaceClass::rock)).end_row();
    }
    w.save(path(artifact::kWorlds));
    plot::MapPlot map;
    map.title = "World " + std::to_string(worlds.front().seed());
    map.fit = false;
    map.upper = {worlds.front().extent_x(), worlds.front().extent_y()};
    map.background = {worlds.front().nx(), worlds.front().ny(), worlds.front().cell_size(), {}, "#f4a582"};
    for (const auto s : worlds.front().surfaces()) map.background.cells.push_back(s == sim::SurfaceClass::coral);
    io::write_text_atomic(cfg.out_dir / "world_00.svg", plot::render_map(map));
    log << "gen-world: " << worlds.size() << " worlds\n";
    return 0;
  }
  if (command == "collect-bc") {
    const auto worlds = worlds_from(read_world_seeds(require(cfg, command, artifact::kWorlds)), cfg.world);
    const auto data = collect_bc(cfg, worlds);
    hindsight::store_save(path(artifact::kBcDataset), data);
    log << "collect-bc: " << data.size() << " trajectories, " << hindsight::total_records(data) << " samples\n";
    return 0;
  }
  if (command == "train-bc") {
    const auto data = hindsight::store_load(require(cfg, command, artifact::kBcDataset));
    const auto trained = train_bc(cfg, data);
    net::save_checkpoint(path(artifact::kBcPolicy), trained.net);
    training_log_csv(trained.report).save(path(artifact::kBcTraining));
    report_training(log, command, trained.report);
    return 0;
  }
  if (command == "collect-explore") {
    const auto worlds = worlds_from(read_world_seeds(require(cfg, command, artifact::kWorlds)), cfg.world);
    const auto bc = net::load_checkpoint(require(cfg, command, artifact::kBcPolicy));
    const auto data = collect_explore(cfg, worlds, bc);
    hindsight::store_save(path(artifact::kExploreDataset), data);
    std::size_t usable = 0;
    for (const auto& t : data) usable += t.collision ? 0 : t.length();
    log << "collect-explore: " << data.size() << " trajectories, " << usable << " goal-trainable samples\n";
    return 0;
  }
  if (command == "train-gc") {
    const auto data = hindsight::store_load(require(cfg, command, artifact::kExploreDataset));
    std::optional<net::PolicyNetwork> bc;
    if (cfg.gc.warm_start) bc = net::load_checkpoint(require(cfg, command, artifact::kBcPolicy));
    const auto trained = train_gc(cfg, data, bc ? &*bc : nullptr, cfg.gc.fusion);
    net::save_checkpoint(path(artifact::kGcPolicy), trained.net);
    training_log_csv(trained.report).save(path(artifact::kGcTraining));
    report_training(log, command, trained.report);
    if (cfg.gc.ablation) {
      const auto other_fusion =
          cfg.gc.fusion == net::GoalFusion::multiply ? net::GoalFusion::concatenate : net::GoalFusion::multiply;
      const auto other = train_gc(cfg, data, bc ? &*bc : nullptr, other_fusion);
      net::save_checkpoint(path(artifact::kGcConcatPolicy), other_fusion == net::GoalFusion::concatenate ? other.net
                                                                                                        : trained.net);
      const auto probes = probe_observations(data, 200);
      const auto sweep = goal_sweep(4.0, 16);
      const double a = goal_sensitivity(trained.net, probes, sweep);
      const double b = goal_sensitivity(other.net, probes, sweep);
      FusionAblation ab = cfg.gc.fusion == net::GoalFusion::multiply ? FusionAblation{a, b} : FusionAblation{b, a};
      fusion_ablation_csv(ab).save(path(artifact::kFusionAblation));
      log << "train-gc: goal sensitivity multiply " << ab.multiply << " concatenate " << ab.concatenate << '\n';
    }
    return 0;
  }
  if (command == "splice") {
    const auto data = hindsight::store_load(require(cfg, command, artifact::kExploreDataset));
    const auto missions = splice_missions(cfg, data);
    fs::create_directories(cfg.out_dir / artifact::kMissionDir);
    std::vector<mission::ReplayResult> replays;
    bool ok = true;
    std::map<std::uint64_t, sim::World> worlds;
    for (std::size_t i = 0; i < missions.size(); ++i) {
      const auto& m = missions[i];
      if (!m.warning.empty()) log << "splice: mission " << i << ": " << m.warning << '\n';
      auto it = worlds.find(m.world_seed);
      if (it == worlds.end()) it = worlds.emplace(m.world_seed, sim::generate_world(m.world_seed, cfg.world)).first;
      replays.push_back(mission::replay_spliced(data, m, {}, &it->second));
      if (replays.back().max_distance > cfg.splice.eps_position + m.mission.threshold) ok = false;
      io::write_text_atomic(cfg.out_dir / artifact::kMissionDir / mission_file(i), mission::format_mission(m.mission));
    }
    splice_report_csv(missions, replays).save(path(artifact::kSpliceReport));
    log << "splice: " << missions.size() << " missions" << (ok ? "" : ", replay check FAILED") << '\n';
    return ok ? 0 : 3;
  }
  if (command == "run-mission") {
    const auto gc = net::load_checkpoint(require(cfg, command, artifact::kGcPolicy));
    const auto missions = read_missions(cfg);
    mission::NetworkPolicy policy(gc, cfg.compare.dropout, "goal-conditioned");
    const auto logs = run_missions(cfg, missions, policy);
    for (std::size_t i = 0; i < logs.size(); ++i) {
      mission::mission_log_csv(logs[i]).save(cfg.out_dir / artifact::kMissionDir / indexed("log", i, ".csv"));
    }
    mission_summary_csv(logs).save(path(artifact::kMissionSummary));
    std::vector<int> reached;
    for (const auto& l : logs) reached.push_back(l.reached);
    std::sort(reached.begin(), reached.end());
    const std::size_t n = reached.size();
    const double median = n % 2 ? reached[n / 2] : 0.5 * (reached[n / 2 - 1] + reached[n / 2]);
    log << "run-mission: " << n << " missions, median reached " << median << '\n';
    return 0;
  }
  if (command == "compare") {
    const auto gc = net::load_checkpoint(require(cfg, command, artifact::kGcPolicy));
    const auto report = compare_policies(cfg, gc);
    const fs::path dir = cfg.out_dir / artifact::kCompareDir;
    fs::create_directories(dir);
    std::vector<std::string> gc_csv, greedy_csv;
    for (std::size_t i = 0; i < report.gc_logs.size(); ++i) {
      gc_csv.push_back(mission::mission_log_csv(report.gc_logs[i]).str());
      greedy_csv.push_back(mission::mission_log_csv(report.greedy_logs[i]).str());
      io::write_text_atomic(dir / indexed("trial_gc", i, ".csv"), gc_csv.back());
      io::write_text_atomic(dir / indexed("trial_greedy", i, ".csv"), greedy_csv.back());
    }
    compare_trials_csv(report).save(path(artifact::kCompareTrials));
    compare_summary_csv(report).save(path(artifact::kCompareSummary));
    io::write_text_atomic(path(artifact::kCompareCoral), compare_coral_svg(report));
    io::write_text_atomic(path(artifact::kComparePaths), compare_paths_svg(report));
    const bool ok = logs_reproduce(report.gc_logs, report.gc, gc_csv) &&
                    logs_reproduce(report.greedy_logs, report.greedy, greedy_csv);
    log << "compare: coral " << report.gc_summary.mean_cumulative_coral << " vs "
        << report.greedy_summary.mean_cumulative_coral << ", reach " << report.gc_summary.reach_rate << " vs "
        << report.greedy_summary.reach_rate << ", time ratio " << report.time_ratio()
        << (ok ? "" : ", metric recomputation FAILED") << '\n';
    return ok ? 0 : 3;
  }
  if (command == "plot") {
    int written = 0;
    for (const char* sub : {artifact::kMissionDir, artifact::kCompareDir}) {
      const fs::path dir = cfg.out_dir / sub;
      if (!fs::is_directory(dir)) continue;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.path().extension() == ".csv" && (name.rfind("log_", 0) == 0 || name.rfind("trial_", 0) == 0)) {
          files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        auto out = f;
        out.replace_extension(".svg");
        io::write_text_atomic(out, mission_log_svg(csv::read(f), f.stem().string()));
        ++written;
      }
    }
    if (written == 0) throw PipelineError("plot: no mission or trial logs under " + cfg.out_dir.string());
    log << "plot: " << written << " SVG files\n";
    return 0;
  }
  throw PipelineError("unknown command '" + command + "'");
}

}  // namespace nav2goal::pipeline
