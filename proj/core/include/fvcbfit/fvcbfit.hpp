#pragma once

#include "fvcbfit/data_io.hpp"
#include "fvcbfit/dataset.hpp"
#include "fvcbfit/error.hpp"
#include "fvcbfit/format.hpp"
#include "fvcbfit/gradient.hpp"
#include "fvcbfit/loss.hpp"
#include "fvcbfit/metrics.hpp"
#include "fvcbfit/model.hpp"
#include "fvcbfit/optimizer.hpp"
#include "fvcbfit/parameters.hpp"
#include "fvcbfit/preprocess.hpp"
#include "fvcbfit/results.hpp"
#include "fvcbfit/synth.hpp"
