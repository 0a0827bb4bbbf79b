#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lrsi/forward.hpp"
#include "lrsi/surface.hpp"

namespace lrsi {

struct MeasurementConfig {
    double k = 0.0;
    double R = 0.0;      // receiver circle radius
    std::size_t M = 0;   // receivers on the upper half circle
    std::size_t N = 0;   // incident directions
    std::size_t L = 0;   // far-field observation directions

    std::vector<Vec2> receivers() const;
    std::vector<IncidentDirection> directions() const;
    std::vector<Vec2> observation_directions() const;
};

enum class NoiseModel { uniform, truncated_gaussian };
const char* noise_model_name(NoiseModel m);
NoiseModel noise_model_from_name(const std::string& s);

struct Provenance {
    std::string profile_kind = "flat";
    std::string profile_spec;  // single-line JSON description, may be empty
    double delta = 0.0;
    std::uint64_t seed = 0;
    NoiseModel noise = NoiseModel::uniform;
    std::string config_hash;
};

struct PhaselessDataset {
    MeasurementConfig config;
    Provenance provenance;
    std::vector<double> values;  // M x N, row-major: receiver i, direction j

    double at(std::size_t i, std::size_t j) const { return values[i * config.N + j]; }
    void validate() const;
};

struct FarFieldDataset {
    MeasurementConfig config;
    Provenance provenance;
    std::vector<cplx> values;  // L x N, row-major

    cplx at(std::size_t i, std::size_t j) const { return values[i * config.N + j]; }
    void validate() const;
};

struct SynthOptions {
    SolverOptions solver;
    int threads = 1;
    // Test hook: the total field is multiplied by this unit phase before
    // taking magnitudes.
    cplx total_field_phase = 1.0;
};

// Largest |x| over the perturbed part of the surface.
double circumradius(const SurfaceProfile& profile);

PhaselessDataset synthesize_phaseless(const SurfaceProfile& profile, const MeasurementConfig& config,
                                      const SynthOptions& opt = {});
// Reuse an existing solved state (its directions must match config.N).
PhaselessDataset synthesize_phaseless(const ScatteringState& state, const MeasurementConfig& config,
                                      const SynthOptions& opt = {});
FarFieldDataset synthesize_farfield(const SurfaceProfile& profile, const MeasurementConfig& config,
                                    const SynthOptions& opt = {});
FarFieldDataset synthesize_farfield(const ScatteringState& state, const MeasurementConfig& config);

// Seeded noise source: one draw per call, values in [-1, 1].
class NoiseSource {
public:
    NoiseSource(std::uint64_t seed, NoiseModel model);
    double next();

private:
    std::mt19937_64 engine_;
    NoiseModel model_;
    double next_unit();  // [0, 1), 53 random bits
};

PhaselessDataset apply_noise(const PhaselessDataset& data, double delta, std::uint64_t seed,
                             NoiseModel model = NoiseModel::uniform);
FarFieldDataset apply_noise(const FarFieldDataset& data, double delta, std::uint64_t seed,
                            NoiseModel model = NoiseModel::uniform);

void save(const PhaselessDataset& data, const std::string& path);
void save(const FarFieldDataset& data, const std::string& path);
PhaselessDataset load_phaseless(const std::string& path);
FarFieldDataset load_farfield(const std::string& path);

// 17 significant digits: parses back to the same double.
std::string format_double(double v);

}  // namespace lrsi
