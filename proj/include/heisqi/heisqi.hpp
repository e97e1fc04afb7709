#pragma once

#include "heisqi/automorphism.hpp"
#include "heisqi/chain_metric.hpp"
#include "heisqi/coset_geometry.hpp"
#include "heisqi/derivation.hpp"
#include "heisqi/distortion.hpp"
#include "heisqi/error.hpp"
#include "heisqi/heisenberg.hpp"
#include "heisqi/qi_classifier.hpp"
#include "heisqi/random.hpp"
#include "heisqi/regularity.hpp"
#include "heisqi/solvable.hpp"
#include "heisqi/spec_io.hpp"
#include "heisqi/visual_metric.hpp"
