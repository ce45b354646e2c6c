// SPDX-License-Identifier: Apache-2.0
//
// relaydiv: diversity analysis toolkit for half-duplex linear relay networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Umbrella header.

#pragma once

#include "bessel.hpp"
#include "channel_model.hpp"
#include "codebook.hpp"
#include "core.hpp"
#include "experiment.hpp"
#include "formats.hpp"
#include "information.hpp"
#include "outage_analysis.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "relay_schemes.hpp"
