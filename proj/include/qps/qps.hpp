#pragma once

#include "qps/classical.hpp"
#include "qps/density.hpp"
#include "qps/error.hpp"
#include "qps/event_matrix.hpp"
#include "qps/goldens.hpp"
#include "qps/io.hpp"
#include "qps/marginals.hpp"
#include "qps/matrix.hpp"
#include "qps/ranking.hpp"
#include "qps/report.hpp"
#include "qps/selftest.hpp"
#include "qps/spectral.hpp"
