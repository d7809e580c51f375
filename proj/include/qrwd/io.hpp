#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrwd/dynamics.hpp"

namespace qrwd {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

// temp file + rename
void atomic_write(const std::string& path, const std::string& bytes);

// Binary PPM (P6, maxval 255) with the documented fixed palette:
// interior flag -> black, escape count c -> table[c mod 16] scaled by depth.
std::string encode_ppm(const EscapeField& field);
void write_image(const EscapeField& field, const std::string& path);

// ---- run configuration -------------------------------------------------------

struct RunConfig {
    // schedule | verify | dilatation | solve | shoot | render | report
    std::string command = "schedule";
    std::string schedule_mode = "toy";  // or "true"
    // toy parameters
    std::vector<int> toy_d = {2, 3, 4};
    std::vector<double> toy_heights;    // optional explicit heights
    double gap_factor = 1.5;
    int multi_q = 0;
    int anchor_level = 2;
    int nmax = 10;
    std::string variant = "even";      // or "symmetric"
    // solver
    double tol = 1e-8;
    int max_terms = 200;
    int resolution = 256;
    double mu_scale = 1.0;
    int pad_factor = 2;
    // shooting
    double shoot_tol = 1e-3;
    int shoot_max_iter = 30;
    // estimates
    double delta1 = 0.1;
    double C = 1.0;
    double K = 1.5;
    double C5 = 1.0;
    // dilatation
    std::string piece = "G";  // G | phi1 | phi2 | phi3 | rho | identity
    int d = 3;
    int grid_res = 256;
    double rho_w_re = 0.5, rho_w_im = 0.0;
    // render
    double window_x = 0.0, window_y = 0.0, window_hw = 4.0, window_hh = 4.0;
    int render_res = 256;
    int max_iter = 64;
    double bailout = 1e3;
    std::string map = "cosh";  // cosh | gw | fw
    // io
    std::string output = "";
    std::string report_path = "";
    std::string input = "";
    std::uint64_t rng_seed = 1;
    int threads = 0;  // 0: library default
};

// Strict JSON parse; unknown keys rejected with the key path.
RunConfig parse_config_json(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

// run a parsed configuration; returns the process exit code (0 pass,
// 1 suite failure, 3 I/O failure)
int run(const RunConfig& cfg);

}  // namespace qrwd
