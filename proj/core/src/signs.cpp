#include "capsel/signs.hpp"

#include <nlohmann/json.hpp>

namespace capsel::signs {

std::pair<SignEstimate, SignVector> estimate_signs(const FeatureMatrix& F,
                                                   const LabelVector& labels,
                                                   int positive_class,
                                                   FlipRule rule) {
  if (static_cast<Eigen::Index>(labels.size()) != F.rows())
    throw core::DimensionError("estimate_signs: label count != rows");
  std::vector<Eigen::Index> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == positive_class ? pos : neg)
        .push_back(static_cast<Eigen::Index>(i));
  if (pos.empty() || neg.empty())
    throw core::InsufficientLabelsError(
        "estimate_signs: need at least one positive and one negative sample");

  const Eigen::Index n = F.cols();
  SignEstimate est;
  est.e_pos.resize(n);
  est.e_neg.resize(n);
  est.raw_sign.resize(n);
  SignVector sv;
  sv.signs.resize(n);
  sv.flip_rule = rule;
  sv.source_class = positive_class;

  Vector buf(static_cast<Eigen::Index>(std::max(pos.size(), neg.size())));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < pos.size(); ++i)
      buf[static_cast<Eigen::Index>(i)] = F(pos[i], j);
    est.e_pos[j] =
        core::sum_fixed_order(buf.data(),
                              static_cast<Eigen::Index>(pos.size())) /
        static_cast<double>(pos.size());
    for (std::size_t i = 0; i < neg.size(); ++i)
      buf[static_cast<Eigen::Index>(i)] = F(neg[i], j);
    est.e_neg[j] =
        core::sum_fixed_order(buf.data(),
                              static_cast<Eigen::Index>(neg.size())) /
        static_cast<double>(neg.size());
    est.raw_sign[j] = est.e_pos[j] - est.e_neg[j];
    sv.signs[j] = est.raw_sign[j] >= 0.0 ? 1 : -1;
  }
  return {std::move(est), std::move(sv)};
}

FeatureMatrix flip(const FeatureMatrix& F, const SignVector& s) {
  if (F.cols() != s.n())
    throw core::DimensionError("flip: sign length != columns");
  if (s.flip_rule == FlipRule::OneMinus &&
      (F.minCoeff() < 0.0 || F.maxCoeff() > 1.0))
    throw core::ModeMismatchError(
        "flip: OneMinus requires features in [0,1]");
  FeatureMatrix out = F;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (s.signs[j] == 1) continue;
    if (s.flip_rule == FlipRule::OneMinus)
      out.col(j) = 1.0 - out.col(j).array();
    else
      out.col(j) = -out.col(j);
  }
  return out;
}

double sign_accuracy(const SignVector& estimated,
                     const SignVector& reference) {
  if (estimated.n() != reference.n())
    throw core::DimensionError("sign_accuracy: length mismatch");
  Eigen::Index agree = 0;
  for (Eigen::Index j = 0; j < estimated.n(); ++j)
    if (estimated.signs[j] == reference.signs[j]) ++agree;
  return static_cast<double>(agree) / static_cast<double>(estimated.n());
}

Matrix class_similarity(const std::vector<SignVector>& signs_by_class) {
  if (signs_by_class.size() < 2)
    throw core::InputError("class_similarity: need at least 2 classes");
  const auto C = static_cast<Eigen::Index>(signs_by_class.size());
  Matrix S(C, C);
  for (Eigen::Index a = 0; a < C; ++a) {
    S(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < C; ++b) {
      const double v = sign_accuracy(signs_by_class[static_cast<std::size_t>(a)],
                                     signs_by_class[static_cast<std::size_t>(b)]);
      S(a, b) = v;
      S(b, a) = v;
    }
  }
  return S;
}

SignVector transfer_signs(const SignVector& source) {
  return source;  // provenance travels in source_class
}

std::string to_json(const SignVector& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n();
  j["flip_rule"] = to_string(s.flip_rule);
  j["signs"] = std::vector<int>(s.signs.data(), s.signs.data() + s.n());
  if (s.source_class)
    j["source_class"] = *s.source_class;
  else
    j["source_class"] = nullptr;
  return j.dump();
}

SignVector sign_vector_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw core::ParseError(std::string("sign vector: ") + e.what());
  }
  SignVector s;
  const auto n = j.at("n").get<Eigen::Index>();
  const auto rule = j.at("flip_rule").get<std::string>();
  if (rule == "one_minus")
    s.flip_rule = FlipRule::OneMinus;
  else if (rule == "negate")
    s.flip_rule = FlipRule::Negate;
  else
    throw core::ParseError("sign vector: unknown flip_rule '" + rule + "'");
  const auto vals = j.at("signs").get<std::vector<int>>();
  if (static_cast<Eigen::Index>(vals.size()) != n)
    throw core::ParseError("sign vector: signs length != n");
  s.signs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int v = vals[static_cast<std::size_t>(i)];
    if (v != 1 && v != -1)
      throw core::ParseError("sign vector: entries must be +1/-1");
    s.signs[i] = v;
  }
  if (j.contains("source_class") && !j["source_class"].is_null())
    s.source_class = j["source_class"].get<int>();
  return s;
}

}  // namespace capsel::signs
