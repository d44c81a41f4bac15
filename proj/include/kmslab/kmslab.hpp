#pragma once

#include "kmslab/core.hpp"
#include "kmslab/cover.hpp"
#include "kmslab/ep_sequence.hpp"
#include "kmslab/growth.hpp"
#include "kmslab/json_io.hpp"
#include "kmslab/kms.hpp"
#include "kmslab/mean_cycle.hpp"
#include "kmslab/oracle.hpp"
#include "kmslab/presentation.hpp"
#include "kmslab/ruelle.hpp"
#include "kmslab/spectral.hpp"
