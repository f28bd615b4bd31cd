#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nomabf/campaign.hpp"

namespace nomabf {

// JSON documents whose keys mirror CampaignConfig / SolverConfig field names.
// Missing keys keep their defaults; unknown keys are rejected.
CampaignConfig campaign_config_from_json(const std::string& text);
std::string campaign_config_to_json(const CampaignConfig& config);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

// Single-instance document for `solve`: a campaign config plus optional
// explicit channel estimates under "channels" ([user][antenna] -> [re, im]).
struct InstanceConfig {
  CampaignConfig campaign;
  std::optional<ChannelSet> channels;
};

InstanceConfig instance_config_from_json(const std::string& text);
InstanceConfig load_instance_config(const std::filesystem::path& path);

}  // namespace nomabf
