#pragma once

#include <har/active.hpp>
#include <har/classifier.hpp>
#include <har/config.hpp>
#include <har/core.hpp>
#include <har/features.hpp>
#include <har/harness.hpp>
#include <har/knn.hpp>
#include <har/labeled_set.hpp>
#include <har/linalg.hpp>
#include <har/mlp.hpp>
#include <har/model_io.hpp>
#include <har/pipeline.hpp>
#include <har/qda.hpp>
#include <har/reduction.hpp>
#include <har/signal.hpp>
#include <har/svm.hpp>
