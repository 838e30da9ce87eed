// Copyright 2026 The wass-smooth Authors
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


#ifndef WASS_SMOOTH_WASS_SMOOTH_HPP_
#define WASS_SMOOTH_WASS_SMOOTH_HPP_

#include <wass_smooth/common.hpp>
#include <wass_smooth/functional.hpp>
#include <wass_smooth/harness.hpp>
#include <wass_smooth/lions.hpp>
#include <wass_smooth/measure.hpp>
#include <wass_smooth/measure_io.hpp>
#include <wass_smooth/parallel.hpp>
#include <wass_smooth/rng.hpp>
#include <wass_smooth/smoothing.hpp>
#include <wass_smooth/transport.hpp>
#include <wass_smooth/truncation.hpp>
#include <wass_smooth/zoo.hpp>

#endif  // WASS_SMOOTH_WASS_SMOOTH_HPP_
