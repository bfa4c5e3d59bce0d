#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tidyplan {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Thrown when a covariance matrix is not symmetric positive definite.
class SingularCovarianceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when every mixture component of an assignment has zero probability.
class UnnormalizableAssignmentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a likelihood ratio has zero mass in both numerator and denominator.
class UndefinedRatioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a place word carries zero mass under every concept.
class UnresolvableWordError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an unknown object needs a word but no oracle can answer.
class UnresolvedUnknownError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a planner references an object that is no longer present.
class StalePlanError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a baseline planner cannot find any database entry to use.
class MissingDatabaseEntryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One multimodal training record: 3D position, object class, optional
/// place-word bag. The word bag may be empty (word-less record).
struct Observation {
  Vec3 position = Vec3::Zero();
  int object_class = 0;
  std::vector<int> words;  // multiset of word indices, may be empty
};

/// Learned parameter set: per-concept Gaussian over positions, categorical
/// distributions over object classes and place words, and mixing weights.
struct ConceptModel {
  int K = 0;                        // concept count
  int L = 0;                        // object-class vocabulary size
  int M = 0;                        // place-word vocabulary size
  std::vector<Vec3> mu;             // mu[k]
  std::vector<Mat3> sigma;          // sigma[k]
  std::vector<std::vector<double>> phi;  // phi[k][l], simplex over classes
  std::vector<std::vector<double>> eta;  // eta[k][m], simplex over words
  std::vector<double> pi;           // mixing weights, simplex over concepts
};

/// Prior hyperparameters: Dirichlet concentrations, the Gaussian-inverse-
/// Wishart prior, and the weak-limit truncation level.
struct Hyperparams {
  double alpha = 0.5;   // object-class Dirichlet concentration
  double beta = 10.0;   // place-word Dirichlet concentration
  double gamma = 15.0;  // mixing-weight Dirichlet concentration
  Vec3 mu0 = Vec3::Zero();
  double kappa0 = 0.1;
  Mat3 psi0 = Mat3::Identity() * 0.01;
  double nu0 = 1000.0;  // must exceed dim + 1 = 4
  int K = 10;           // weak-limit truncation
};

/// A training set, with ground-truth concept assignments when synthetic.
struct LabeledDataset {
  std::vector<Observation> observations;
  std::optional<std::vector<int>> truth_assignments;
  int num_classes = 0;
  int num_words = 0;
  std::vector<std::string> class_names;  // optional, may be empty
  std::vector<std::string> word_names;   // optional, may be empty

  [[nodiscard]] std::size_t size() const { return observations.size(); }
};

inline constexpr double kSimplexTolerance = 1e-9;

/// Validates simplex sums, SPD covariances and dimension consistency.
/// Throws std::invalid_argument (or SingularCovarianceError) on violation.
void validate(const ConceptModel& model);

/// Validates positivity of concentrations, SPD psi0, nu0 > 4 and K >= 1.
void validate(const Hyperparams& h);

/// Validates class/word index ranges and truth-label consistency.
void validate(const LabeledDataset& data);

}  // namespace tidyplan
