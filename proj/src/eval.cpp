#include "indoorlidar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ilidar {

namespace {

using Point2 = Eigen::Vector2d;

std::vector<Point2> footprint(const LabeledBox& box) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const double hl = box.dimensions.x() / 2.0;
    const double hw = box.dimensions.y() / 2.0;
    std::vector<Point2> corners(4);
    const double ox[4] = {hl, -hl, -hl, hl};
    const double oy[4] = {hw, hw, -hw, -hw};
    for (int i = 0; i < 4; ++i) {
        corners[i] = Point2(box.center.x() + c * ox[i] - s * oy[i],
                            box.center.y() + s * ox[i] + c * oy[i]);
    }
    return corners;  // counter-clockwise
}

double polygon_area(const std::vector<Point2>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return std::abs(twice) / 2.0;
}

// Sutherland-Hodgman: clip `subject` against the convex CCW `clip`.
std::vector<Point2> clip_polygon(std::vector<Point2> subject,
                                 const std::vector<Point2>& clip) {
    for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
        const Point2& ca = clip[e];
        const Point2& cb = clip[(e + 1) % clip.size()];
        const Point2 edge = cb - ca;
        auto inside = [&](const Point2& p) {
            return edge.x() * (p.y() - ca.y()) - edge.y() * (p.x() - ca.x()) >=
                   0.0;
        };
        std::vector<Point2> output;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Point2& p = subject[i];
            const Point2& q = subject[(i + 1) % subject.size()];
            const bool pin = inside(p);
            const bool qin = inside(q);
            if (pin) output.push_back(p);
            if (pin != qin) {
                const double dp =
                    edge.x() * (p.y() - ca.y()) - edge.y() * (p.x() - ca.x());
                const double dq =
                    edge.x() * (q.y() - ca.y()) - edge.y() * (q.x() - ca.x());
                const double t = dp / (dp - dq);
                output.push_back(p + t * (q - p));
            }
        }
        subject = std::move(output);
    }
    return subject;
}

void validate_box(const LabeledBox& box) {
    if (!(box.dimensions.minCoeff() > 0.0)) {
        throw std::invalid_argument("iou: box has non-positive dimensions");
    }
}

double bev_intersection_area(const LabeledBox& a, const LabeledBox& b) {
    return polygon_area(clip_polygon(footprint(a), footprint(b)));
}

// Identical parameters must give IoU exactly 1; the clipping path can
// lose a few ulps on rotated corners.
bool same_box_2d(const LabeledBox& a, const LabeledBox& b) {
    return a.center.x() == b.center.x() && a.center.y() == b.center.y() &&
           a.dimensions.x() == b.dimensions.x() &&
           a.dimensions.y() == b.dimensions.y() && a.yaw == b.yaw;
}

}  // namespace

double iou_bev(const LabeledBox& a, const LabeledBox& b) {
    validate_box(a);
    validate_box(b);
    if (same_box_2d(a, b)) return 1.0;
    const double area_a = a.dimensions.x() * a.dimensions.y();
    const double area_b = b.dimensions.x() * b.dimensions.y();
    const double inter =
        std::min({bev_intersection_area(a, b), area_a, area_b});
    return inter / (area_a + area_b - inter);
}

double iou_3d(const LabeledBox& a, const LabeledBox& b) {
    validate_box(a);
    validate_box(b);
    const double z_overlap =
        std::max(0.0, std::min(a.center.z() + a.dimensions.z() / 2.0,
                               b.center.z() + b.dimensions.z() / 2.0) -
                          std::max(a.center.z() - a.dimensions.z() / 2.0,
                                   b.center.z() - b.dimensions.z() / 2.0));
    if (same_box_2d(a, b) && a.center.z() == b.center.z() &&
        a.dimensions.z() == b.dimensions.z()) {
        return 1.0;
    }
    const double vol_a = a.dimensions.prod();
    const double vol_b = b.dimensions.prod();
    const double inter =
        std::min({bev_intersection_area(a, b) * z_overlap, vol_a, vol_b});
    return inter / (vol_a + vol_b - inter);
}

MatchSet match_frame(const std::vector<LabeledBox>& gts,
                     const std::vector<LabeledBox>& dets, double iou_threshold,
                     bool class_aware) {
    if (!(iou_threshold > 0.0) || iou_threshold > 1.0) {
        throw std::invalid_argument("match_frame: threshold must be in (0, 1]");
    }
    struct Candidate {
        double iou;
        int gt;
        int det;
    };
    std::vector<Candidate> candidates;
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
        for (int d = 0; d < static_cast<int>(dets.size()); ++d) {
            if (class_aware && gts[g].class_label != dets[d].class_label) {
                continue;
            }
            const double iou = iou_3d(gts[g], dets[d]);
            if (iou >= iou_threshold) candidates.push_back({iou, g, d});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  if (a.iou != b.iou) return a.iou > b.iou;
                  if (a.gt != b.gt) return a.gt < b.gt;
                  return a.det < b.det;
              });

    MatchSet out;
    std::vector<bool> gt_used(gts.size(), false);
    std::vector<bool> det_used(dets.size(), false);
    for (const auto& c : candidates) {
        if (gt_used[c.gt] || det_used[c.det]) continue;
        gt_used[c.gt] = true;
        det_used[c.det] = true;
        out.pairs.push_back({c.gt, c.det, c.iou});
    }
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
        if (!gt_used[g]) out.unmatched_gt.push_back(g);
    }
    for (int d = 0; d < static_cast<int>(dets.size()); ++d) {
        if (!det_used[d]) out.unmatched_det.push_back(d);
    }
    return out;
}

EvalReport compute_report(const std::vector<EvalFrame>& frames,
                          double match_threshold) {
    if (frames.empty()) {
        throw std::invalid_argument("compute_report: no frames");
    }
    EvalReport report;
    report.acc_at = {{0.25, 0.0}, {0.50, 0.0}, {0.75, 0.0}};

    double iou_sum = 0.0;
    double l1_sum = 0.0;
    double l2_sum = 0.0;
    std::map<double, int> acc_counts = {{0.25, 0}, {0.50, 0}, {0.75, 0}};

    for (const auto& frame : frames) {
        const MatchSet matches =
            match_frame(frame.gts, frame.dets, match_threshold, true);
        for (const auto& pair : matches.pairs) {
            const LabeledBox& gt = frame.gts[pair.gt_index];
            const LabeledBox& det = frame.dets[pair.det_index];
            ++report.counts[gt.class_label].tp;
            iou_sum += pair.iou;
            const Vec3 delta = det.center - gt.center;
            l1_sum += delta.cwiseAbs().sum();
            l2_sum += delta.squaredNorm();
            for (auto& [threshold, count] : acc_counts) {
                if (pair.iou >= threshold) ++count;
            }
            ++report.matched_pairs;
        }
        for (const int g : matches.unmatched_gt) {
            ++report.counts[frame.gts[g].class_label].fn;
        }
        for (const int d : matches.unmatched_det) {
            ++report.counts[frame.dets[d].class_label].fp;
        }
    }

    for (const auto& [cls, c] : report.counts) {
        report.precision[cls] =
            (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    }
    if (report.matched_pairs > 0) {
        report.mean_iou = iou_sum / report.matched_pairs;
        report.l1_error = l1_sum / report.matched_pairs;
        report.l2_error = l2_sum / report.matched_pairs;
        for (auto& [threshold, acc] : report.acc_at) {
            acc = static_cast<double>(acc_counts[threshold]) /
                  report.matched_pairs;
        }
    }
    return report;
}

std::string render_report_table(const EvalReport& report) {
    std::ostringstream out;
    char buf[128];
    out << "Metric                         Value\n";
    out << "Classification Precision (P)\n";
    for (const auto& [cls, p] : report.precision) {
        const auto& c = report.counts.at(cls);
        std::snprintf(buf, sizeof(buf), "  %-28s %.2f  (TP %d  FP %d  FN %d)\n",
                      cls.c_str(), p, c.tp, c.fp, c.fn);
        out << buf;
    }
    out << "Bounding Box\n";
    std::snprintf(buf, sizeof(buf), "  %-28s %.2f\n", "Mean IoU",
                  report.mean_iou);
    out << buf;
    for (const double threshold : {0.25, 0.50, 0.75}) {
        std::snprintf(buf, sizeof(buf), "  Acc@IoU%.2f%-17s %.2f\n", threshold,
                      "", report.acc_at.at(threshold));
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "  %-28s %.2f\n", "L1", report.l1_error);
    out << buf;
    std::snprintf(buf, sizeof(buf), "  %-28s %.2f\n", "L2", report.l2_error);
    out << buf;
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["precision"] = report.precision;
    nlohmann::ordered_json counts;
    for (const auto& [cls, c] : report.counts) {
        counts[cls] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    }
    j["counts"] = std::move(counts);
    j["mean_iou"] = report.mean_iou;
    j["acc_at"] = {{"0.25", report.acc_at.at(0.25)},
                   {"0.50", report.acc_at.at(0.50)},
                   {"0.75", report.acc_at.at(0.75)}};
    j["l1_error"] = report.l1_error;
    j["l2_error"] = report.l2_error;
    j["matched_pairs"] = report.matched_pairs;
    return j.dump(2) + "\n";
}

}  // namespace ilidar
