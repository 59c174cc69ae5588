#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mcprox/roster.hpp"

namespace mcprox {

inline constexpr int kModelFormatVersion = 1;

/// Self-describing text form of one trained model:
///
///   mcprox-model 1
///   number 13
///   kind comb_general
///   device oneplus
///   config_digest <hex>
///   params max_depth=8 min_samples_leaf=1 n_trees=10 features=sqrt
///   forest 10
///   tree <n_nodes> <n_features>
///   <feature> <threshold> <left> <right> <n_vc> <n_c> <n_safe>      (one line per node)
///   end
///
/// Threshold models carry `threshold <d_vc> <d_c> <tx_power> <correction>`, combiners
/// `combination <onehot|probability> <w_ble> <w_24> <w_5> <c1> <c2> <c3>`.
/// Numbers are written in shortest round-trip form, so reading is lossless.
void write_model(std::ostream& out, const TrainedModel& model, const std::string& device,
                 const std::string& config_digest = {});

struct LoadedModel {
    TrainedModel model;
    std::string device;
    std::string config_digest;
};

/// Throws DataError on malformed input or an unsupported version.
LoadedModel read_model(std::istream& in, std::string_view source = "<model>");

std::filesystem::path model_path(const std::filesystem::path& dir, int number);
void save_roster(const std::filesystem::path& dir, const Roster& roster, const std::string& config_digest = {});
/// Loads whichever model files exist; absent models stay absent.
Roster load_roster(const std::filesystem::path& dir, const std::string& device);

}  // namespace mcprox
