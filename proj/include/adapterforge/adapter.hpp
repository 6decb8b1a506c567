#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adapterforge/analyser.hpp"
#include "adapterforge/conversion.hpp"
#include "adapterforge/rational.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::adapter {

inline constexpr std::string_view kToolVersion = "adapterforge 0.1.0";

/// Provider argument taken unchanged from consumer parameter `index`.
struct Take {
  std::size_t index = 0;
  bool operator==(const Take&) const = default;
};

/// Provider argument converted from consumer parameter `index`.
struct Convert {
  std::size_t index = 0;
  analyser::ConversionRule rule;
  bool operator==(const Convert&) const = default;
};

/// Provider argument filled with the provider's default literal.
struct Fill {
  spec::Value value;
  bool operator==(const Fill&) const = default;
};

using SlotAction = std::variant<Take, Convert, Fill>;

struct OpMapping {
  std::string from;  // required (consumer) operation
  std::string to;    // provided operation
  std::vector<SlotAction> slots;  // one per provider parameter
  std::optional<analyser::ConversionRule> return_conversion;  // nullopt is PASS

  bool operator==(const OpMapping&) const = default;
};

struct Provenance {
  std::string project;
  Rational score{1};
  std::string tool{kToolVersion};
  bool operator==(const Provenance&) const = default;
};

/// A generated one-directional adapter: implements the consumer's required interface by
/// delegating to the provider's provided interface.
struct AdapterSpec {
  std::string name;
  spec::Version version{1, 0, 0};
  std::string consumer_component;
  spec::InterfaceSpec implements;  // the consumer's required interface, verbatim
  std::string provider_component;
  spec::Version provider_version;
  spec::InterfaceSpec delegates_to;  // the provider's provided interface, verbatim
  std::vector<OpMapping> mappings;
  Provenance provenance;

  /// The adapter as a component: `implements` provided, `delegates_to` required.
  spec::ComponentSpec as_component() const;

  bool operator==(const AdapterSpec&) const = default;
};

/// Builds one mapping per required operation from the connection's mismatch payloads.
/// Throws E_NOT_ADAPTABLE unless the verdict is ADAPTABLE.
AdapterSpec generate_adapter(const analyser::ConnectionReport& report, const spec::ComponentSpec& consumer,
                             const spec::ComponentSpec& provider, const std::string& project_name);

/// Canonical `.adapter` document (sorted-key JSON, newline-terminated).
std::string emit_descriptor(const AdapterSpec& adapter);
/// Inverse of emit_descriptor. Throws E_INVALID_SPEC.
AdapterSpec parse_descriptor(std::string_view text);

/// The shipped pseudocode template (also in templates/default.stub).
std::string_view default_stub_template();
/// Mechanical placeholder substitution; see docs/templates.md. Throws E_TEMPLATE.
std::string emit_stub(const AdapterSpec& adapter, std::string_view tmpl);

using ProviderFn = std::function<spec::Value(std::span<const spec::Value>)>;

/// Executes a mapping: builds provider arguments, calls `provider`, converts the result.
/// Throws E_NARROW when a checked conversion fails at run time.
spec::Value interpret_mapping(const OpMapping& mapping, std::span<const spec::Value> args, const ProviderFn& provider);

}  // namespace adapterforge::adapter
