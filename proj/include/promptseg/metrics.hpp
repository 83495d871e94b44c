#pragma once

#include "promptseg/mask.hpp"

#include <cstdint>
#include <vector>

namespace promptseg {

inline constexpr int background_class = 0;
inline constexpr int fire_class = 1;

/// C x C pixel confusion matrix. `n(j, i)` counts pixels of true class i
/// predicted as class j, so the true-class total t_i is a column sum and the
/// predicted total t̂_i is a row sum.
class ConfusionCounts {
  public:
    explicit ConfusionCounts(int num_classes = 2);

    int num_classes() const { return num_classes_; }

    std::uint64_t n(int predicted, int truth) const { return cells_[cell(predicted, truth)]; }
    void add(int predicted, int truth, std::uint64_t count = 1) { cells_[cell(predicted, truth)] += count; }

    /// t_i: pixels whose true class is i.
    std::uint64_t true_total(int i) const;
    /// t̂_i: pixels predicted as class i.
    std::uint64_t predicted_total(int i) const;
    std::uint64_t total() const;

    std::uint64_t tp() const { return n(fire_class, fire_class); }
    std::uint64_t fp() const { return n(fire_class, background_class); }
    std::uint64_t fn() const { return n(background_class, fire_class); }
    std::uint64_t tn() const { return n(background_class, background_class); }

    /// n_ii / (t_i + t̂_i - n_ii); 0 when the class is absent from both sides.
    double iou(int i) const;

    friend bool operator==(ConfusionCounts const&, ConfusionCounts const&) = default;

  private:
    std::size_t cell(int predicted, int truth) const
    {
        return static_cast<std::size_t>(predicted) * num_classes_ + truth;
    }

    int num_classes_;
    std::vector<std::uint64_t> cells_;
};

/// Throws DimensionMismatch naming both shapes.
ConfusionCounts confusion_counts(BinaryMask const& pred, BinaryMask const& gt);

double pixel_accuracy(ConfusionCounts const& c);

/// Mean of n_ii / t_i over classes present in the ground truth.
double mean_accuracy(ConfusionCounts const& c);

/// Mean IoU over classes present in the ground truth or the prediction.
/// A class only hallucinated by the prediction contributes IoU 0.
double mean_iou(ConfusionCounts const& c);

double fw_iou(ConfusionCounts const& c);

/// Dice of one class (fire by default); 1.0 when the class is absent from
/// both masks.
double dice(ConfusionCounts const& c, int cls = fire_class);

inline constexpr double default_mae_scale = 255.0;

struct MaeValue {
    double raw = 0.0;
    double scaled = 0.0;
};

MaeValue mae(BinaryMask const& pred, BinaryMask const& gt, double scale = default_mae_scale);
MaeValue mae(ConfusionCounts const& c, double scale = default_mae_scale);

struct MetricBundle {
    double pa = 0.0;
    double ma = 0.0;
    double miou = 0.0;
    double fwiou = 0.0;
    double dice = 0.0;
    double mae_raw = 0.0;
    double mae_scaled = 0.0;

    friend bool operator==(MetricBundle const&, MetricBundle const&) = default;
};

MetricBundle compute_metrics(ConfusionCounts const& c, double mae_scale = default_mae_scale);
MetricBundle compute_metrics(BinaryMask const& pred, BinaryMask const& gt, double mae_scale = default_mae_scale);

/// Field-wise arithmetic mean. Throws on an empty list.
MetricBundle mean_bundle(std::vector<MetricBundle> const& bundles);

} // namespace promptseg
