/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_DETLAB_HPP
#define DETLAB_DETLAB_HPP

#include "detlab/adapt.hpp"
#include "detlab/channel.hpp"
#include "detlab/cmatrix.hpp"
#include "detlab/config.hpp"
#include "detlab/detect.hpp"
#include "detlab/errors.hpp"
#include "detlab/modem.hpp"
#include "detlab/ofdm.hpp"
#include "detlab/rng.hpp"
#include "detlab/runner.hpp"
#include "detlab/simkit.hpp"
#include "detlab/version.hpp"

#endif // DETLAB_DETLAB_HPP
