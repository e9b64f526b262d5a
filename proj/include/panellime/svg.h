/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Minimal SVG charts for explanations, ICE curves and evaluation runs.

#ifndef PANELLIME_SVG_H_
#define PANELLIME_SVG_H_

#include <string>

#include "panellime/evaluation.h"
#include "panellime/global_explanations.h"
#include "panellime/lime.h"

namespace panellime {

// Horizontal bars, one per selected feature; negative weights point left.
std::string explanation_svg(const Explanation& e);

// One thin line per instance and a thick PDP line.
std::string ice_svg(const IceCurve& curve);

// LIME and random R^2 side by side for every run, with the full-model R^2 as
// a reference line.
std::string eval_svg(const EvalReport& report);

}  // namespace panellime

#endif  // PANELLIME_SVG_H_
