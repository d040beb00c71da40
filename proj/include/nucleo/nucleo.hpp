// Copyright 2026 The nucleo Authors
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

#ifndef NUCLEO_NUCLEO_HPP
#define NUCLEO_NUCLEO_HPP

#include "nucleo/bmatching.hpp"
#include "nucleo/hyperdp.hpp"
#include "nucleo/linalg.hpp"
#include "nucleo/lp.hpp"
#include "nucleo/nucleolus.hpp"
#include "nucleo/rational.hpp"
#include "nucleo/subspace.hpp"
#include "nucleo/voting.hpp"

#endif  // NUCLEO_NUCLEO_HPP
