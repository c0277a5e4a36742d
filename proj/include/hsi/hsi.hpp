#pragma once

// Umbrella header.

#include "hsi/annotation.hpp"
#include "hsi/episode_init.hpp"
#include "hsi/error.hpp"
#include "hsi/experiment.hpp"
#include "hsi/localization.hpp"
#include "hsi/motion.hpp"
#include "hsi/random.hpp"
#include "hsi/reward_cases.hpp"
#include "hsi/se3.hpp"
#include "hsi/sensor_sim.hpp"
#include "hsi/synthetic.hpp"
#include "hsi/task/amp.hpp"
#include "hsi/task/composition.hpp"
#include "hsi/task/observations.hpp"
#include "hsi/task/rewards.hpp"
#include "hsi/task/success.hpp"
#include "hsi/task/types.hpp"
