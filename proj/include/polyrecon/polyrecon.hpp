// Copyright 2026 The polyrecon Authors.
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

#pragma once

#include "geometry.hpp"
#include "rng.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"
#include "polytope.hpp"
#include "delaunay.hpp"
#include "surface.hpp"
#include "plane_extraction.hpp"
#include "structuring.hpp"
#include "spectral.hpp"
#include "clustering.hpp"
#include "target_volume.hpp"
#include "evolution.hpp"
#include "synthetic.hpp"
#include "config.hpp"
#include "io.hpp"
#include "pipeline.hpp"
