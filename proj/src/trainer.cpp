#include "ceda/trainer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ceda/incentives.hpp"
#include "ceda/sensing.hpp"

namespace ceda {
namespace {

enum LearnerStream : std::uint64_t { kInit = 101, kExplore = 102, kReplay = 103, kEpisodes = 104 };

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

int greedy_action(const Eigen::VectorXd& q) {
  int best = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return best;
}

int select_action(const QNetwork& net, std::span<const double> joint_state, double epsilon,
                  Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(net.output_size())));
  }
  return greedy_action(net.forward(joint_state));
}

double epsilon_at(int episode, int episodes, const LearnerConfig& cfg) {
  const double horizon = cfg.epsilon_decay_fraction * episodes;
  if (horizon <= 0.0 || cfg.epsilon_start <= 0.0) return cfg.epsilon_min;
  const double progress = std::min(1.0, episode / horizon);
  const double ratio = cfg.epsilon_min / cfg.epsilon_start;
  return std::max(cfg.epsilon_min, cfg.epsilon_start * std::pow(ratio, progress));
}

double td_loss(const QNetwork& policy, const QNetwork& target, const TrainingBatch& batch,
               double gamma, ParamSet* grads) {
  if (batch.transitions == 0) throw std::invalid_argument("td_loss: empty batch");
  const Eigen::MatrixXd next_q = target.forward_batch(batch.next_states);
  QNetwork::Trace trace;
  const Eigen::MatrixXd q = policy.forward_batch(batch.states, trace);
  const auto cols = q.cols();
  const double n = static_cast<double>(batch.transitions);
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(q.rows(), cols);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double bootstrap = (1.0 - batch.terminal[c]) * next_q.col(c).maxCoeff();
    const double td = batch.rewards[c] + gamma * bootstrap - q(batch.actions[c], c);
    loss += td * td;
    d_out(batch.actions[c], c) = -2.0 * td / n;
  }
  if (grads) *grads = policy.backward(trace, d_out);
  return loss / n;
}

TdResult td_update(QNetwork& policy, const QNetwork& target, const TrainingBatch& batch,
                   double gamma, AdamOptimizer& optimizer, double grad_clip) {
  ParamSet grads;
  TdResult r;
  r.loss = td_loss(policy, target, batch, gamma, &grads);
  r.grad_norm = clip_global_norm(grads, grad_clip);
  r.clipped_grad_norm = grads.norm();
  optimizer.step(policy, grads);
  return r;
}

std::string TrainingLog::csv_header() {
  return "episode,steps,reward0,reward1,reward_total,delivered,expired,landed0,landed1,"
         "bothLanded,collisions,battery0,battery1,d_w1,d_w2,d_w3,u_w1,u_w2,u_w3,s_w1,s_w2,s_w3,"
         "epsilon,U,eta,updates,mean_loss";
}

std::string TrainingLog::csv_row(const EpisodeLog& r) {
  std::ostringstream o;
  o << r.episode << ',' << r.steps << ',' << num(r.reward0) << ',' << num(r.reward1) << ','
    << num(r.reward_total()) << ',' << r.delivered << ',' << r.expired << ',' << r.landed0 << ','
    << r.landed1 << ',' << (r.landed0 && r.landed1) << ',' << r.collisions << ','
    << num(r.battery0) << ',' << num(r.battery1);
  for (int v : r.delivered_by_class) o << ',' << v;
  for (int v : r.expired_by_class) o << ',' << v;
  for (int v : r.spawned_by_class) o << ',' << v;
  o << ',' << num(r.epsilon) << ',' << num(r.utilization) << ',' << num(r.eta) << ','
    << r.updates << ',' << num(r.mean_loss);
  return o.str();
}

void TrainingLog::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

EpisodeLog summarize_episode(int episode, const EpisodeRecord& rec, double epsilon,
                             long long updates, double mean_loss) {
  EpisodeLog l;
  l.episode = episode;
  l.steps = rec.steps;
  l.reward0 = rec.reward[0];
  l.reward1 = rec.reward[1];
  l.delivered = rec.delivered();
  l.expired = rec.expired();
  l.landed0 = rec.landed[0];
  l.landed1 = rec.landed[1];
  l.collisions = rec.collisions();
  l.battery0 = rec.end_battery[0];
  l.battery1 = rec.end_battery[1];
  l.delivered_by_class = rec.delivered_by_class();
  l.expired_by_class = rec.expired_by_class();
  l.spawned_by_class = rec.spawned_by_class();
  l.epsilon = epsilon;
  l.utilization = utilization(rec).value_or(0.0);
  l.eta = triage_efficiency(rec).value_or(0.0);
  l.updates = updates;
  l.mean_loss = mean_loss;
  return l;
}

std::vector<int> network_dims(const RunConfig& cfg) {
  const int obs = static_cast<int>(features::observation_size(cfg.triage.max_patients));
  std::vector<int> dims{2 * obs};
  dims.insert(dims.end(), cfg.learner.hidden.begin(), cfg.learner.hidden.end());
  dims.push_back(kActionCount);
  return dims;
}

TrainResult train(const RunConfig& cfg, std::uint64_t seed, const TrainOptions& options) {
  validate(cfg);
  const LearnerConfig& lc = cfg.learner;
  Rng init_rng(derive_seed(seed, kInit));
  Rng explore_rng(derive_seed(seed, kExplore));
  Rng replay_rng(derive_seed(seed, kReplay));

  TrainResult result;
  result.policy = QNetwork::initialized(network_dims(cfg), init_rng);
  QNetwork target = result.policy;
  AdamOptimizer optimizer(result.policy, lc.learning_rate);
  const std::size_t obs_dim = features::observation_size(cfg.triage.max_patients);
  ReplayBuffer buffer(static_cast<std::size_t>(lc.buffer_capacity), obs_dim);
  World world(cfg, cfg.world.map_seed);

  std::ofstream log_csv;
  std::filesystem::path ckpt_path;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    ckpt_path = *options.out_dir / "checkpoint.ckpt";
    log_csv.open(*options.out_dir / "training_log.csv", std::ios::trunc);
    if (!log_csv) {
      throw std::runtime_error("cannot write " + (*options.out_dir / "training_log.csv").string());
    }
    log_csv << TrainingLog::csv_header() << '\n';
  }

  long long updates = 0;
  for (int ep = 0; ep < lc.episodes; ++ep) {
    const double epsilon = epsilon_at(ep, lc.episodes, lc);
    const std::uint64_t ep_seed = derive_seed(seed, kEpisodes + 0x10000ULL * (ep + 1));
    world.reset(ep_seed);
    EpisodeRecorder recorder;
    recorder.begin(world, ep_seed);

    Observation o0 = observe(world, 0);
    Observation o1 = observe(world, 1);
    JointState q0, q1;
    double loss_sum = 0.0;
    long long ep_updates = 0;
    while (!world.terminal()) {
      q0 = o0;
      q0.insert(q0.end(), o1.begin(), o1.end());
      q1 = o1;
      q1.insert(q1.end(), o0.begin(), o0.end());
      const int a0 = select_action(result.policy, q0, epsilon, explore_rng);
      const int a1 = select_action(result.policy, q1, epsilon, explore_rng);

      const PreStep pre = capture_pre_step(world);
      StepOutcome out = world.step({static_cast<Action>(a0), static_cast<Action>(a1)});
      const auto rewards = assign_rewards(world, out, pre, cfg.reward);
      Observation n0 = observe(world, 0);
      Observation n1 = observe(world, 1);
      // Truncation at the step cap is a horizon artifact and bootstraps.
      const bool terminal = out.terminal && !out.truncated();
      buffer.push({o0, o1, n0, n1, a0, a1, out.reward[0], out.reward[1], terminal});

      if (buffer.size() >= static_cast<std::size_t>(lc.batch_size)) {
        const TrainingBatch batch = buffer.sample(static_cast<std::size_t>(lc.batch_size), replay_rng);
        loss_sum += td_update(result.policy, target, batch, lc.gamma, optimizer, lc.grad_clip).loss;
        ++ep_updates;
      }
      recorder.observe(world, out, rewards);
      o0 = std::move(n0);
      o1 = std::move(n1);
    }
    updates += ep_updates;

    if ((ep + 1) % lc.target_sync == 0) sync_target(result.policy, target);

    const EpisodeRecord rec = recorder.finish(world);
    const EpisodeLog row = summarize_episode(ep, rec, epsilon, updates,
                                             ep_updates ? loss_sum / ep_updates : 0.0);
    result.log.rows.push_back(row);
    if (log_csv.is_open()) log_csv << TrainingLog::csv_row(row) << '\n' << std::flush;
    if (options.on_episode) options.on_episode(row);
    if (options.out_dir && (ep + 1) % lc.checkpoint_interval == 0) {
      save_checkpoint(result.policy, ckpt_path);
    }
  }
  if (options.out_dir) save_checkpoint(result.policy, ckpt_path);
  return result;
}

}  // namespace ceda
