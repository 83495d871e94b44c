#include "promptseg/metrics.hpp"

#include "promptseg/error.hpp"

#include <stdexcept>

namespace promptseg {

ConfusionCounts::ConfusionCounts(int num_classes)
    : num_classes_(num_classes), cells_(static_cast<std::size_t>(num_classes) * num_classes, 0)
{
    if (num_classes < 1) {
        throw std::invalid_argument("confusion matrix needs at least one class");
    }
}

std::uint64_t ConfusionCounts::true_total(int i) const
{
    std::uint64_t sum = 0;
    for (int j = 0; j < num_classes_; ++j) {
        sum += n(j, i);
    }
    return sum;
}

std::uint64_t ConfusionCounts::predicted_total(int i) const
{
    std::uint64_t sum = 0;
    for (int j = 0; j < num_classes_; ++j) {
        sum += n(i, j);
    }
    return sum;
}

std::uint64_t ConfusionCounts::total() const
{
    std::uint64_t sum = 0;
    for (auto v : cells_) {
        sum += v;
    }
    return sum;
}

double ConfusionCounts::iou(int i) const
{
    auto const denom = true_total(i) + predicted_total(i) - n(i, i);
    return denom == 0 ? 0.0 : static_cast<double>(n(i, i)) / static_cast<double>(denom);
}

ConfusionCounts confusion_counts(BinaryMask const& pred, BinaryMask const& gt)
{
    if (!pred.same_shape(gt)) {
        throw DimensionMismatch("prediction", pred.width(), pred.height(), "ground truth", gt.width(), gt.height());
    }
    // Index = 2 * pred + gt over the four binary outcomes.
    std::uint64_t tally[4] = {0, 0, 0, 0};
    auto const p = pred.bits();
    auto const g = gt.bits();
    for (std::size_t k = 0; k < p.size(); ++k) {
        ++tally[2 * p[k] + g[k]];
    }
    ConfusionCounts c(2);
    c.add(background_class, background_class, tally[0]);
    c.add(background_class, fire_class, tally[1]);
    c.add(fire_class, background_class, tally[2]);
    c.add(fire_class, fire_class, tally[3]);
    return c;
}

double pixel_accuracy(ConfusionCounts const& c)
{
    auto const total = c.total();
    if (total == 0) {
        throw std::invalid_argument("pixel accuracy of an empty confusion matrix");
    }
    std::uint64_t correct = 0;
    for (int i = 0; i < c.num_classes(); ++i) {
        correct += c.n(i, i);
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

double mean_accuracy(ConfusionCounts const& c)
{
    double sum = 0.0;
    int included = 0;
    for (int i = 0; i < c.num_classes(); ++i) {
        auto const t = c.true_total(i);
        if (t == 0) {
            continue;
        }
        sum += static_cast<double>(c.n(i, i)) / static_cast<double>(t);
        ++included;
    }
    if (included == 0) {
        throw std::invalid_argument("mean accuracy: no class present in the ground truth");
    }
    return sum / included;
}

double mean_iou(ConfusionCounts const& c)
{
    double sum = 0.0;
    int included = 0;
    for (int i = 0; i < c.num_classes(); ++i) {
        if (c.true_total(i) == 0 && c.predicted_total(i) == 0) {
            continue;
        }
        sum += c.iou(i);
        ++included;
    }
    if (included == 0) {
        throw std::invalid_argument("mean IoU of an empty confusion matrix");
    }
    return sum / included;
}

double fw_iou(ConfusionCounts const& c)
{
    auto const total = c.total();
    if (total == 0) {
        throw std::invalid_argument("frequency-weighted IoU of an empty confusion matrix");
    }
    double sum = 0.0;
    for (int i = 0; i < c.num_classes(); ++i) {
        auto const t = c.true_total(i);
        if (t == 0) {
            continue;
        }
        sum += static_cast<double>(t) / static_cast<double>(total) * c.iou(i);
    }
    return sum;
}

double dice(ConfusionCounts const& c, int cls)
{
    auto const denom = c.true_total(cls) + c.predicted_total(cls);
    if (denom == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(c.n(cls, cls)) / static_cast<double>(denom);
}

MaeValue mae(ConfusionCounts const& c, double scale)
{
    auto const total = c.total();
    if (total == 0) {
        throw std::invalid_argument("MAE of an empty confusion matrix");
    }
    std::uint64_t wrong = 0;
    for (int j = 0; j < c.num_classes(); ++j) {
        for (int i = 0; i < c.num_classes(); ++i) {
            if (i != j) {
                wrong += c.n(j, i);
            }
        }
    }
    double const raw = static_cast<double>(wrong) / static_cast<double>(total);
    return {raw, raw * scale};
}

MaeValue mae(BinaryMask const& pred, BinaryMask const& gt, double scale)
{
    return mae(confusion_counts(pred, gt), scale);
}

MetricBundle compute_metrics(ConfusionCounts const& c, double mae_scale)
{
    MetricBundle m;
    m.pa = pixel_accuracy(c);
    m.ma = mean_accuracy(c);
    m.miou = mean_iou(c);
    m.fwiou = fw_iou(c);
    m.dice = dice(c);
    auto const e = mae(c, mae_scale);
    m.mae_raw = e.raw;
    m.mae_scaled = e.scaled;
    return m;
}

MetricBundle compute_metrics(BinaryMask const& pred, BinaryMask const& gt, double mae_scale)
{
    return compute_metrics(confusion_counts(pred, gt), mae_scale);
}

MetricBundle mean_bundle(std::vector<MetricBundle> const& bundles)
{
    if (bundles.empty()) {
        throw std::invalid_argument("mean of zero metric bundles");
    }
    MetricBundle m;
    for (auto const& b : bundles) {
        m.pa += b.pa;
        m.ma += b.ma;
        m.miou += b.miou;
        m.fwiou += b.fwiou;
        m.dice += b.dice;
        m.mae_raw += b.mae_raw;
        m.mae_scaled += b.mae_scaled;
    }
    auto const n = static_cast<double>(bundles.size());
    m.pa /= n;
    m.ma /= n;
    m.miou /= n;
    m.fwiou /= n;
    m.dice /= n;
    m.mae_raw /= n;
    m.mae_scaled /= n;
    return m;
}

} // namespace promptseg
