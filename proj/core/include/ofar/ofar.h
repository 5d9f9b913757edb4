// Copyright 2026 The ofar Authors
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

#pragma once

#include "ofar/contrastive.h"
#include "ofar/corpus.h"
#include "ofar/corpus_item.h"
#include "ofar/embedding.h"
#include "ofar/encoder.h"
#include "ofar/error.h"
#include "ofar/eval.h"
#include "ofar/index.h"
#include "ofar/maxsim.h"
#include "ofar/metrics.h"
#include "ofar/service.h"
#include "ofar/synthetic.h"
#include "ofar/token_matrix.h"
#include "ofar/trainer.h"
