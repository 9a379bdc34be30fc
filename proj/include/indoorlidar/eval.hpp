#pragma once

#include <map>
#include <string>
#include <vector>

#include "indoorlidar/annotate.hpp"

namespace ilidar {

// Intersection over union of the yaw-rotated ground-plane footprints.
double iou_bev(const LabeledBox& a, const LabeledBox& b);

// BEV overlap area times vertical overlap; exact for yaw-only boxes.
double iou_3d(const LabeledBox& a, const LabeledBox& b);

struct MatchPair {
    int gt_index;
    int det_index;
    double iou;
};

struct MatchSet {
    std::vector<MatchPair> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_det;
};

// Greedy matching by descending iou_3d; ties broken by (gt, det) index.
MatchSet match_frame(const std::vector<LabeledBox>& gts,
                     const std::vector<LabeledBox>& dets, double iou_threshold,
                     bool class_aware = true);

struct ClassCounts {
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

struct EvalReport {
    std::map<std::string, double> precision;  // per class, pooled TP/FP
    std::map<std::string, ClassCounts> counts;
    double mean_iou = 0.0;
    std::map<double, double> acc_at;  // thresholds 0.25 / 0.50 / 0.75
    double l1_error = 0.0;  // mean Manhattan center distance, meters
    double l2_error = 0.0;  // mean squared Euclidean center distance
    int matched_pairs = 0;
};

struct EvalFrame {
    std::vector<LabeledBox> gts;
    std::vector<LabeledBox> dets;
};

EvalReport compute_report(const std::vector<EvalFrame>& frames,
                          double match_threshold = 0.25);

// Table mirroring the benchmark row layout, plus a JSON document with
// every report field.
std::string render_report_table(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace ilidar
