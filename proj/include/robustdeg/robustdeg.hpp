#pragma once

#include "robustdeg/adversary.hpp"
#include "robustdeg/bench.hpp"
#include "robustdeg/certificates.hpp"
#include "robustdeg/concentration.hpp"
#include "robustdeg/edge_list.hpp"
#include "robustdeg/estimators.hpp"
#include "robustdeg/graph.hpp"
#include "robustdeg/json_io.hpp"
#include "robustdeg/lanczos.hpp"
#include "robustdeg/parallel.hpp"
#include "robustdeg/rng.hpp"
#include "robustdeg/sampling.hpp"
