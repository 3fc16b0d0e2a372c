#pragma once

#include "algebra.hpp"
#include "bench.hpp"
#include "domains.hpp"
#include "export.hpp"
#include "greedy.hpp"
#include "interpolant.hpp"
#include "json_io.hpp"
#include "kernels.hpp"
#include "rootfind.hpp"
#include "test_functions.hpp"
