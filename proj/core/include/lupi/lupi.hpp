#pragma once

#include "lupi/classifier.hpp"
#include "lupi/dataset.hpp"
#include "lupi/error.hpp"
#include "lupi/experiment.hpp"
#include "lupi/margin_transfer.hpp"
#include "lupi/model_selection.hpp"
#include "lupi/qp.hpp"
#include "lupi/serialization.hpp"
#include "lupi/stats.hpp"
#include "lupi/svm.hpp"
#include "lupi/svm_plus.hpp"
