// Copyright 2026 The darkzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DARKZENO_DARKZENO_HPP
#define DARKZENO_DARKZENO_HPP

#include "darkzeno/core.hpp"
#include "darkzeno/hilbert.hpp"
#include "darkzeno/model.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/observables.hpp"
#include "darkzeno/sweep.hpp"
#include "darkzeno/config.hpp"
#include "darkzeno/export.hpp"
#include "darkzeno/commands.hpp"

#endif  // DARKZENO_DARKZENO_HPP
