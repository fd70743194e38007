#pragma once

// Published per-task (LPS, RS, FS) cells for eight methods, tasks in
// kTableOrder, followed by the printed overall row; published training-set
// counts per task and origin.

#include <array>
#include <cstdint>
#include <string_view>

#include "degbench/core/task.hpp"

namespace testutil {

struct PublishedCell {
  double lps, rs, fs;
};

struct PublishedRow {
  std::string_view method;
  std::array<PublishedCell, 9> tasks;
  PublishedCell overall;
};

inline constexpr std::array<PublishedRow, 8> kPublishedRows = {{
    {"Nano Banana Pro",
     {{{0.429, 2.063, 0.236}, {0.326, 1.068, 0.144}, {0.467, 0.720, 0.077},
       {0.492, 1.920, 0.195}, {0.358, 1.368, 0.176}, {0.214, 1.222, 0.192},
       {0.562, 1.560, 0.137}, {0.386, 0.712, 0.087}, {0.483, 1.122, 0.116}}},
     {0.413, 1.306, 0.153}},
    {"GPT-Image-1.5",
     {{{0.535, 2.120, 0.197}, {0.532, 1.667, 0.156}, {0.523, 1.048, 0.100},
       {0.558, 1.840, 0.163}, {0.468, 2.320, 0.247}, {0.336, 1.415, 0.188},
       {0.646, 1.633, 0.116}, {0.496, 0.993, 0.100}, {0.633, 1.167, 0.086}}},
     {0.525, 1.578, 0.150}},
    {"Seedream 4.5",
     {{{0.438, 1.500, 0.169}, {0.254, 0.255, 0.038}, {0.423, 0.600, 0.069},
       {0.418, 1.140, 0.133}, {0.291, 1.156, 0.164}, {0.225, 1.104, 0.171},
       {0.548, 1.600, 0.145}, {0.387, 0.770, 0.094}, {0.529, 1.136, 0.107}}},
     {0.390, 1.029, 0.125}},
    {"LongCat-Image-Edit",
     {{{0.381, 1.302, 0.161}, {0.200, 0.000, 0.000}, {0.158, 0.120, 0.020},
       {0.236, 0.000, 0.000}, {0.254, 1.060, 0.158}, {0.241, 1.717, 0.261},
       {0.420, 1.200, 0.139}, {0.350, 0.471, 0.061}, {0.188, 0.083, 0.014}}},
     {0.270, 0.661, 0.097}},
    {"Qwen-Image-Edit-2511",
     {{{0.435, 1.736, 0.196}, {0.170, 0.240, 0.040}, {0.122, 0.080, 0.014},
       {0.337, 0.060, 0.008}, {0.333, 1.820, 0.243}, {0.222, 1.660, 0.258},
       {0.595, 1.660, 0.135}, {0.429, 0.824, 0.094}, {0.242, 0.300, 0.046}}},
     {0.320, 0.931, 0.127}},
    {"FLUX.1-Kontext-dev",
     {{{0.244, 0.673, 0.102}, {0.090, 0.104, 0.019}, {0.108, 0.160, 0.029},
       {0.058, 0.020, 0.004}, {0.048, 0.127, 0.024}, {0.064, 0.264, 0.049},
       {0.348, 0.540, 0.070}, {0.429, 0.628, 0.072}, {0.429, 0.628, 0.072}}},
     {0.202, 0.349, 0.056}},
    {"Step1X-Edit",
     {{{0.282, 0.019, 0.003}, {0.321, 0.906, 0.123}, {0.306, 0.340, 0.047},
       {0.194, 0.190, 0.031}, {0.247, 0.080, 0.012}, {0.173, 0.000, 0.000},
       {0.654, 0.410, 0.028}, {0.409, 0.098, 0.012}, {0.344, 0.383, 0.050}}},
     {0.325, 0.270, 0.036}},
    {"Candidate",
     {{{0.371, 1.076, 0.135}, {0.582, 1.900, 0.159}, {0.597, 1.360, 0.110},
       {0.339, 0.680, 0.090}, {0.290, 1.620, 0.230}, {0.239, 1.623, 0.247},
       {0.563, 1.620, 0.142}, {0.478, 0.863, 0.090}, {0.547, 1.067, 0.097}}},
     {0.445, 1.312, 0.146}},
}};

struct PublishedCount {
  degbench::TaskKind task;
  std::uint64_t synthetic, real;
};

inline constexpr std::array<PublishedCount, 9> kPublishedCounts = {{
    {degbench::TaskKind::Rain, 84968, 43415},
    {degbench::TaskKind::Blur, 1014229, 13458},
    {degbench::TaskKind::LowLight, 5000, 7005},
    {degbench::TaskKind::Haze, 103971, 8147},
    {degbench::TaskKind::Reflection, 68227, 7604},
    {degbench::TaskKind::Flare, 59520, 7956},
    {degbench::TaskKind::Moire, 99085, 0},
    {degbench::TaskKind::Noise, 64492, 0},
    {degbench::TaskKind::Compression, 68000, 0},
}};

inline constexpr std::uint64_t kPublishedSyntheticTotal = 1567492;
inline constexpr std::uint64_t kPublishedRealTotal = 87585;
inline constexpr std::uint64_t kPublishedTotal = 1655077;

}  // namespace testutil
