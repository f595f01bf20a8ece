#include "lupi/serialization.hpp"

#include <string>

#include "lupi/error.hpp"

namespace lupi {
namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("JSON: missing field '") + key + "'");
  return j.at(key);
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index cols, const char* name) {
  if (!j.is_array()) throw DataError(std::string("JSON: '") + name + "' must be an array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DataError(std::string("JSON: row ") + std::to_string(r) + " of '" + name + "' must have " +
                      std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < row.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
  }
  return m;
}

}  // namespace

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("JSON: expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw DataError("JSON: non-numeric array entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json to_json(const LinearModel& model, const Json& meta) {
  return Json{{"w", to_json(model.w)}, {"b", model.b}, {"meta", meta}};
}

LinearModel linear_model_from_json(const Json& j) {
  return LinearModel{vector_from_json(require(j, "w")), require(j, "b").get<double>()};
}

Json to_json(const LinearModel& model, const SlackModel& slack, const Json& meta) {
  return Json{{"w", to_json(model.w)},
              {"b", model.b},
              {"w_star", to_json(slack.w_star)},
              {"b_star", slack.b_star},
              {"meta", meta}};
}

SlackModel slack_model_from_json(const Json& j) {
  return SlackModel{vector_from_json(require(j, "w_star")), require(j, "b_star").get<double>()};
}

Json to_json(const MarginVector& margins) {
  return Json{{"rho", to_json(margins.rho)}, {"epsilon", margins.epsilon}};
}

MarginVector margin_vector_from_json(const Json& j) {
  MarginVector m{vector_from_json(require(j, "rho")), require(j, "epsilon").get<double>()};
  if (!(m.epsilon > 0.0)) throw DataError("margins document: epsilon must be positive");
  if (m.rho.size() > 0 && m.rho.minCoeff() < m.epsilon) throw DataError("margins document: rho below epsilon");
  return m;
}

Json to_json(const BinaryModel& model, const Json& meta) {
  Json doc;
  switch (model.method) {
    case Method::svm:
    case Method::reference_privileged:
      doc = to_json(model.model, meta);
      break;
    case Method::svm_plus:
      if (!model.slack) throw InvalidArgument("SVM+ model without slack function");
      doc = to_json(model.model, *model.slack, meta);
      break;
    case Method::margin_transfer:
      if (!model.teacher || !model.margins) throw InvalidArgument("margin transfer model without teacher");
      doc = Json{{"student", to_json(model.model)},
                 {"teacher", to_json(*model.teacher)},
                 {"margins", to_json(*model.margins)},
                 {"meta", meta}};
      break;
  }
  Json out{{"type", std::string(to_string(model.method))}};
  out.update(doc);
  out["training"] = Json{{"objective", model.stats.objective},
                         {"residual", model.stats.residual},
                         {"converged", model.stats.converged},
                         {"iterations", model.stats.iterations}};
  return out;
}

BinaryModel binary_model_from_json(const Json& j) {
  BinaryModel m;
  try {
    m.method = parse_method(require(j, "type").get<std::string>());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
  switch (m.method) {
    case Method::svm:
    case Method::reference_privileged:
      m.model = linear_model_from_json(j);
      break;
    case Method::svm_plus:
      m.model = linear_model_from_json(j);
      m.slack = slack_model_from_json(j);
      break;
    case Method::margin_transfer:
      m.model = linear_model_from_json(require(j, "student"));
      m.teacher = linear_model_from_json(require(j, "teacher"));
      m.margins = margin_vector_from_json(require(j, "margins"));
      break;
  }
  if (j.contains("training")) {
    const Json& t = j.at("training");
    m.stats = TrainingStats{require(t, "objective").get<double>(), require(t, "residual").get<double>(),
                            require(t, "converged").get<bool>(), require(t, "iterations").get<int>()};
  }
  return m;
}

Json to_json(const OvrModel& model) {
  Json models = Json::array();
  for (const auto& m : model.models) models.push_back(to_json(m));
  return Json{{"type", "ovr"},
              {"method", std::string(to_string(model.method))},
              {"class_ids", model.class_ids},
              {"models", std::move(models)}};
}

OvrModel ovr_model_from_json(const Json& j) {
  OvrModel m;
  m.method = parse_method(require(j, "method").get<std::string>());
  m.class_ids = require(j, "class_ids").get<std::vector<int>>();
  for (const auto& doc : require(j, "models")) m.models.push_back(binary_model_from_json(doc));
  if (m.models.size() != m.class_ids.size()) throw DataError("OvR document: one model per class required");
  return m;
}

QpProblem qp_problem_from_json(const Json& j) {
  QpProblem qp;
  qp.q = vector_from_json(require(j, "q"));
  const Eigen::Index n = qp.q.size();
  qp.p = matrix_from_json(require(j, "P"), n, "P");
  if (qp.p.rows() != n) throw DataError("JSON: P must be n x n");
  if (j.contains("G")) {
    qp.g = matrix_from_json(j.at("G"), n, "G");
    qp.h = vector_from_json(require(j, "h"));
  } else {
    qp.g.resize(0, n);
    qp.h.resize(0);
  }
  if (j.contains("A")) {
    qp.a = matrix_from_json(j.at("A"), n, "A");
    qp.b = vector_from_json(require(j, "b"));
  } else {
    qp.a.resize(0, n);
    qp.b.resize(0);
  }
  if (qp.g.rows() != qp.h.size()) throw DataError("JSON: G and h sizes differ");
  if (qp.a.rows() != qp.b.size()) throw DataError("JSON: A and b sizes differ");
  return qp;
}

Json to_json(const QpSolution& s) {
  return Json{{"status", std::string(to_string(s.status))},
              {"x", to_json(s.x)},
              {"lambda_ineq", to_json(s.lambda_ineq)},
              {"nu_eq", to_json(s.nu_eq)},
              {"objective", s.objective},
              {"kkt_residual", s.kkt_residual},
              {"iterations", s.iterations}};
}

}  // namespace lupi
