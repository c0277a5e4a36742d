#pragma once

#include <map>
#include <string>
#include <vector>

#include "hsi/task/rewards.hpp"

namespace hsi::task {

using TermMap = std::map<std::string, double>;

struct RewardWeights {
  double w_task = 0.7;
  double w_regularization = 0.7;
  double w_style = 0.3;
  double w_gp = 1.0;
};

struct RewardBreakdown {
  TermMap terms;
  double r_task = 0;
  double r_regularization = 0;
  double r_style = 0;
  double total = 0;
};

/// Stage terms summed into each task reward.
inline std::vector<std::string> task_term_names(Task task) {
  switch (task) {
    case Task::CarryBox: return {"loco", "carry", "pick", "put"};
    case Task::SitDown: return {"loco", "sit"};
    case Task::LieDown: return {"loco", "lie"};
    case Task::StandUp: return {"standup", "loco_tar"};
    case Task::StyleLoco: return {"style_loco"};
  }
  return {};
}

/// Evaluates every stage term of `task` for one step.
inline TermMap task_terms(Task task, const RobotState& s, const SceneState& scene, const VelocityCommand& cmd = {},
                          LieBranches lie = LieBranches::Standard) {
  switch (task) {
    case Task::CarryBox:
      return {{"loco", r_loco(s, scene)}, {"carry", r_carry(s, scene)}, {"pick", r_pick(s, scene)},
              {"put", r_put(s, scene)}};
    case Task::SitDown: return {{"loco", r_loco(s, scene)}, {"sit", r_sit(s, scene)}};
    case Task::LieDown: return {{"loco", r_loco(s, scene)}, {"lie", r_lie(s, scene, lie)}};
    case Task::StandUp: return {{"standup", r_standup(s)}, {"loco_tar", r_loco_tar(s, scene)}};
    case Task::StyleLoco: return {{"style_loco", r_style_loco(s, cmd)}};
  }
  return {};
}

/// r = w_G r_G + w_R r_R + w_S r_S, with r_G the sum of the task's stage terms.
inline RewardBreakdown total_reward(Task task, const TermMap& terms, double r_regularization, double r_style,
                                    const RewardWeights& w = {}) {
  RewardBreakdown out;
  for (const auto& name : task_term_names(task)) {
    const auto it = terms.find(name);
    if (it == terms.end()) throw InvalidArgument("total_reward: missing term '" + name + "'");
    out.r_task += it->second;
  }
  if (terms.size() != task_term_names(task).size()) throw InvalidArgument("total_reward: unexpected extra terms");
  out.terms = terms;
  out.r_regularization = r_regularization;
  out.r_style = r_style;
  out.total = w.w_task * out.r_task + w.w_regularization * r_regularization + w.w_style * r_style;
  return out;
}

}  // namespace hsi::task
