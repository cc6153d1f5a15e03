// io.hpp: JSON/CSV persistence for controls, trajectories, diagnostic
// reports, and spectral data files. All encodings are deterministic (no
// timestamps, round-trip exact doubles) so re-running from saved artifacts
// reproduces byte-identical output.
#pragma once

#include <iosfwd>
#include <string>

#include "qcbench/control.hpp"
#include "qcbench/diagnostics.hpp"
#include "qcbench/propagator.hpp"
#include "qcbench/spectral.hpp"

namespace qcbench::io {

// Piecewise constant control <-> JSON
//   {"schema_version":1,"kind":"control","breakpoints":[...],"values":[...]}
std::string control_to_json(const prop::PiecewiseConstantControl& u);
prop::PiecewiseConstantControl control_from_json(const std::string& text);

// Piecewise constant control <-> CSV with header t_start,t_end,value and one
// row per segment (%.17g, so reloads are exact).
std::string control_to_csv(const prop::PiecewiseConstantControl& u);
prop::PiecewiseConstantControl control_from_csv(const std::string& text);

// Trajectory <-> JSON
//   {"schema_version":1,"kind":"trajectory","order":N,"control_l1":x,
//    "times":[...],"cumulative_l1":[...],"states":[[[re,im],...],...]}
std::string trajectory_to_json(const prop::Trajectory& traj);
prop::Trajectory trajectory_from_json(const std::string& text);

// Plot-ready CSV: header then one row per sample with columns
// t, re_1..re_N, im_1..im_N, pop_1..pop_N (%.17g).
void write_trajectory_csv(std::ostream& out, const prop::Trajectory& traj);

// Diagnostic report -> one JSON object (no trailing newline); suites emit
// one line per report (JSONL).
std::string report_to_json(const diag::DiagnosticReport& report);

// Spectral data file: external systems given by explicit spectral data,
//   {"schema_version":1,"kind":"spectral-data","name":...,
//    "eigenvalues":[lambda_1 > lambda_2 > ...],
//    "couplings":[[j,k,re,im],...],            // operator-level, 1-based
//    "b_opnorm":...,                            // optional
//    "control_set":{"kind":"interval","lo":..,"hi":..} |
//                  {"kind":"finite","values":[...]}}    // optional
// Listed triplets are validated for skew-Hermiticity; missing mirror entries
// are derived as -conj. The loaded system is capped at max_order = the number
// of eigenvalues listed and declares no norm-growth coupling bounds.
spectral::SystemPtr system_from_json(const std::string& text);

// Exports levels 1..N of any system to the schema above (operator-level
// upper-triangle couplings; the analytic coupling bound is not representable
// and is dropped).
std::string spectral_data_to_json(const spectral::SpectralSystem& sys, int N);

// File helpers; throw std::runtime_error when the path cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qcbench::io
