#pragma once

#include <nlohmann/json.hpp>

#include "lupi/classifier.hpp"
#include "lupi/qp.hpp"

namespace lupi {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// {"w": [...], "b": ..., "meta": {...}}
Json to_json(const LinearModel& model, const Json& meta = Json::object());
LinearModel linear_model_from_json(const Json& j);

/// {"w": [...], "b": ..., "w_star": [...], "b_star": ..., "meta": {...}}
Json to_json(const LinearModel& model, const SlackModel& slack, const Json& meta = Json::object());
SlackModel slack_model_from_json(const Json& j);

Json to_json(const MarginVector& margins);
MarginVector margin_vector_from_json(const Json& j);

/// Self-describing document with a "type" field: "svm", "svm_plus",
/// "margin_transfer" or "reference_svm_on_privileged".
Json to_json(const BinaryModel& model, const Json& meta = Json::object());
BinaryModel binary_model_from_json(const Json& j);

/// {"type": "ovr", "method": ..., "class_ids": [...], "models": [...]}
Json to_json(const OvrModel& model);
OvrModel ovr_model_from_json(const Json& j);

/// QP layout used by `lupi diag qp`:
/// {"P": [[...]], "q": [...], "G": [[...]], "h": [...], "A": [[...]], "b": [...]}
/// G/h and A/b are optional.
QpProblem qp_problem_from_json(const Json& j);
Json to_json(const QpSolution& solution);

}  // namespace lupi
