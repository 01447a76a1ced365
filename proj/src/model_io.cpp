#include "oddchern/model_io.hpp"

#include <json.hpp>

#include <stdexcept>

namespace oddchern {

namespace {

using nlohmann::json;

Mat matrix_from_json(const json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw std::invalid_argument(where + ": expected " + std::to_string(rows * cols) +
                                " [re,im] pairs");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const json& e = j[r * cols + c];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument(where + ": entries must be [re, im] pairs");
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

}  // namespace

HoppingModel model_from_json(const nlohmann::json& doc) {
  HoppingModel model;
  model.name = doc.value("name", std::string("custom"));
  model.dimension = doc.at("dimension").get<int>();
  model.orbitals = doc.at("orbitals").get<int>();
  if (model.dimension <= 0 || model.dimension % 2 == 0)
    throw std::invalid_argument("model.dimension: must be odd and positive");
  if (model.orbitals <= 0 || model.orbitals % 2 != 0)
    throw std::invalid_argument("model.orbitals: must be even and positive");

  const int d = model.dimension;
  const int tn = model.orbitals;
  const int half = tn / 2;

  // Chiral frame; rotate a non-standard frame to diag(1_N, -1_N).
  Mat frame = Mat::Zero(tn, tn);
  Mat rotation = Mat::Identity(tn, tn);
  const json& frame_doc = doc.value("chiral_frame", json("standard"));
  if (frame_doc.is_string() && frame_doc.get<std::string>() == "standard") {
    frame.topLeftCorner(half, half).setIdentity();
    frame.bottomRightCorner(half, half) = -Mat::Identity(half, half);
  } else {
    const Mat raw = matrix_from_json(frame_doc, tn, tn, "model.chiral_frame");
    if (hermiticity_residual(raw) > 1e-10 ||
        max_abs(raw * raw - Mat::Identity(tn, tn)) > 1e-10)
      throw std::invalid_argument("model.chiral_frame: must be an involutive Hermitian unitary");
    Eigen::SelfAdjointEigenSolver<Mat> es(raw);
    // Eigenvalues ascend, so columns come out (-1 sector, +1 sector); reorder.
    long plus = 0;
    for (long i = 0; i < tn; ++i)
      if (es.eigenvalues()(i) > 0) ++plus;
    if (plus != half)
      throw std::invalid_argument("model.chiral_frame: the two eigenvalue sectors must have equal size");
    Mat w(tn, tn);
    w.leftCols(half) = es.eigenvectors().rightCols(half);
    w.rightCols(half) = es.eigenvectors().leftCols(half);
    rotation = w;
    frame.topLeftCorner(half, half).setIdentity();
    frame.bottomRightCorner(half, half) = -Mat::Identity(half, half);
  }
  model.chiral_frame = frame;

  model.magnetic_form = RealMat::Zero(d, d);
  if (doc.contains("magnetic_form")) {
    const json& mf = doc.at("magnetic_form");
    if (!mf.is_array() || static_cast<int>(mf.size()) != d)
      throw std::invalid_argument("model.magnetic_form: expected d rows");
    for (int i = 0; i < d; ++i) {
      if (!mf[i].is_array() || static_cast<int>(mf[i].size()) != d)
        throw std::invalid_argument("model.magnetic_form: expected d columns per row");
      for (int j = 0; j < d; ++j) model.magnetic_form(i, j) = mf[i][j].get<double>();
    }
  }

  if (!doc.contains("hoppings") || !doc.at("hoppings").is_array())
    throw std::invalid_argument("model.hoppings: expected an array");
  for (const json& h : doc.at("hoppings")) {
    const json& disp = h.at("displacement");
    if (!disp.is_array() || static_cast<int>(disp.size()) != d)
      throw std::invalid_argument("model.hoppings.displacement: expected d integers");
    std::vector<int> a(d);
    for (int i = 0; i < d; ++i) a[i] = disp[i].get<int>();
    Mat t = matrix_from_json(h.at("matrix"), tn, tn, "model.hoppings.matrix");
    t = rotation.adjoint() * t * rotation;
    model.set_hopping(a, t);
  }

  if (doc.contains("disorder")) {
    const json& dis = doc.at("disorder");
    model.disorder.bond_coupling = dis.value("bond_coupling", 0.0);
    model.disorder.mass_coupling = dis.value("mass_coupling", 0.0);
    if (dis.contains("mass_matrix")) {
      Mat mm = matrix_from_json(dis.at("mass_matrix"), tn, tn, "model.disorder.mass_matrix");
      model.disorder.mass_matrix = rotation.adjoint() * mm * rotation;
    }
    model.lambda = model.disorder.bond_coupling;
    model.lambda_prime = model.disorder.mass_coupling;
  }

  model.validate();
  return model;
}

nlohmann::json model_to_json(const HoppingModel& model) {
  json doc;
  doc["name"] = model.name;
  doc["dimension"] = model.dimension;
  doc["orbitals"] = model.orbitals;
  doc["chiral_frame"] = "standard";
  json hoppings = json::array();
  for (const auto& [a, t] : model.hoppings)
    hoppings.push_back({{"displacement", a}, {"matrix", matrix_to_json(t)}});
  doc["hoppings"] = std::move(hoppings);
  json mf = json::array();
  for (int i = 0; i < model.dimension; ++i) {
    json row = json::array();
    for (int j = 0; j < model.dimension; ++j) row.push_back(model.magnetic_form(i, j));
    mf.push_back(std::move(row));
  }
  doc["magnetic_form"] = std::move(mf);
  if (model.disorder.enabled()) {
    json dis;
    dis["bond_coupling"] = model.disorder.bond_coupling;
    dis["mass_coupling"] = model.disorder.mass_coupling;
    if (model.disorder.mass_matrix.size() > 0)
      dis["mass_matrix"] = matrix_to_json(model.disorder.mass_matrix);
    doc["disorder"] = std::move(dis);
  }
  return doc;
}

}  // namespace oddchern
