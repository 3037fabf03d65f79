#pragma once

#include <span>
#include <vector>

#include "coughgate/classifiers.hpp"

namespace coughgate::internal {

SvmState train_svm(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                   const std::vector<Label>& y);

double svm_decision(const SvmState& state, Family family, double hyperparameter,
                    std::span<const double> x);

LdaState train_lda(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                   const std::vector<Label>& y);

/// Gaussian log-density discriminant difference, COVID minus non-COVID.
double lda_decision(const LdaState& state, std::span<const double> x);

PlsrState train_plsr(const ClassifierSpec& spec, const std::vector<std::vector<double>>& x,
                     const std::vector<Label>& y);

/// Raw regression output (the 0.5 threshold is applied by the caller).
double plsr_output(const PlsrState& state, std::span<const double> x);

Prediction knn_predict(const KnnState& state, Family family, int k, std::span<const double> x);

} // namespace coughgate::internal
