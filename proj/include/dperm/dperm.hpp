// Copyright 2026 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the header-only core.

#ifndef DPERM_DPERM_HPP_
#define DPERM_DPERM_HPP_

#include "dperm/core.hpp"
#include "dperm/geometry.hpp"
#include "dperm/losses.hpp"
#include "dperm/oracle.hpp"
#include "dperm/potentials.hpp"
#include "dperm/privacy.hpp"
#include "dperm/solvers.hpp"

#endif  // DPERM_DPERM_HPP_
