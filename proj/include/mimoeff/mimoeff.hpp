// SPDX-License-Identifier: Apache-2.0
//
// mimoeff - MIMO efficiency evaluation and antenna optimization toolkit
// Copyright (C) 2026 The mimoeff authors
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

#ifndef MIMOEFF_HPP
#define MIMOEFF_HPP

#include "combining.hpp"
#include "environment.hpp"
#include "evaluation.hpp"
#include "farfield.hpp"
#include "ffg_io.hpp"
#include "gaopt.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#endif
